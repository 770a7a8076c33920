#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>

#include "gesturepipe/dataset.hpp"
#include "gesturepipe/pipeline.hpp"
#include "gesturepipe/synth.hpp"

namespace {

struct RunArgs {
    std::string frames, config, model, bindings, classes, sink = "stdout", log, track_csv,
        obs_log;
};

struct TrainArgs {
    std::string data, out;
    gp::cnn::TrainConfig cfg;
    int val_per_class = 50;
};

struct EvalArgs {
    std::string data, model, report;
};

struct SynthArgs {
    std::string out;
    gp::synth::SynthConfig cfg;
};

struct CalibrateArgs {
    std::string frame, patch, out;
    gp::pipeline::CalibrateOptions options;
};

int cmd_run(const RunArgs& a) {
    gp::PipelineConfig cfg = a.config.empty() ? gp::PipelineConfig{} : gp::load_config(a.config);
    if (!a.model.empty()) cfg.model_path = a.model;
    if (!a.bindings.empty()) cfg.bindings_path = a.bindings;
    if (!a.classes.empty()) cfg.classes_path = a.classes;
    if (cfg.model_path.empty()) throw gp::ConfigError("no model given (--model or pipeline.model)");
    if (cfg.bindings_path.empty())
        throw gp::ConfigError("no bindings given (--bindings or pipeline.bindings)");
    if (cfg.classes_path.empty()) cfg.classes_path = cfg.model_path + ".classes";

    const gp::cnn::CnnModel model = gp::cnn::load_model(cfg.model_path);
    const std::vector<std::string> classes = gp::pipeline::load_class_names(cfg.classes_path);
    const gp::respond::BindingSet bindings(
        gp::respond::BindingSet::parse_file(cfg.bindings_path), classes);

    gp::pipeline::Pipeline pipeline(cfg, model, classes, bindings);

    std::vector<std::unique_ptr<gp::events::EventSink>> owned;
    if (a.sink == "stdout") {
        owned.push_back(std::make_unique<gp::events::StreamSink>(std::cout));
    } else if (a.sink.rfind("tcp:", 0) == 0) {
        const auto colon = a.sink.rfind(':');
        if (colon == 3) throw std::invalid_argument("--sink tcp:HOST:PORT");
        const std::string host = a.sink.substr(4, colon - 4);
        const int port = std::stoi(a.sink.substr(colon + 1));
        owned.push_back(std::make_unique<gp::events::TcpSink>(host, port));
    } else {
        throw std::invalid_argument("unknown sink '" + a.sink + "'");
    }
    std::unique_ptr<std::ofstream> obs_stream;
    if (!a.log.empty()) owned.push_back(std::make_unique<gp::events::FileSink>(a.log));

    gp::pipeline::RunOptions options;
    options.frames_dir = a.frames;
    for (auto& s : owned) options.sinks.push_back(s.get());
    options.warn = &std::cerr;
    options.track_csv = a.track_csv;
    if (!a.obs_log.empty()) {
        obs_stream = std::make_unique<std::ofstream>(a.obs_log);
        if (!*obs_stream) throw gp::IoError("cannot write " + a.obs_log);
        options.obs_log = obs_stream.get();
    }

    const gp::pipeline::RunStats stats = gp::pipeline::run(pipeline, options);
    std::cerr << "frames=" << stats.frames << " skipped=" << stats.skipped
              << " events=" << stats.command_events << " dropped=" << stats.dropped_events
              << " latency_ms mean=" << stats.mean_latency_ms << " p95=" << stats.p95_latency_ms
              << "\n";
    return 0;
}

int cmd_train(const TrainArgs& a) {
    const gp::cnn::LabeledDataset full = gp::cnn::load_dataset(a.data);
    const auto [train_set, val_set] = gp::cnn::split_dataset(full, a.val_per_class, a.cfg.seed);
    const gp::cnn::TrainResult result = gp::cnn::train(train_set, val_set, a.cfg);

    gp::cnn::save_model(result.model, a.out);
    gp::pipeline::save_class_names(full.class_names, a.out + ".classes");

    std::ofstream curves(a.out + ".curves.csv");
    if (!curves) throw gp::IoError("cannot write " + a.out + ".curves.csv");
    curves << "epoch,loss,val_accuracy\n";
    for (std::size_t e = 0; e < result.epoch_loss.size(); ++e)
        curves << e + 1 << "," << result.epoch_loss[e] << "," << result.val_accuracy[e] << "\n";

    std::cout << "trained " << full.class_names.size() << " classes, "
              << train_set.size() << " train / " << val_set.size() << " val samples\n"
              << "final loss=" << result.epoch_loss.back()
              << " val_accuracy=" << result.val_accuracy.back() << "\n"
              << "model: " << a.out << "\n";
    return 0;
}

int cmd_eval(const EvalArgs& a) {
    const gp::cnn::CnnModel model = gp::cnn::load_model(a.model);
    const gp::cnn::LabeledDataset ds = gp::cnn::load_dataset(a.data);
    if (static_cast<int>(ds.class_names.size()) != model.num_classes)
        throw gp::ConfigError("dataset has " + std::to_string(ds.class_names.size()) +
                              " classes but the model expects " +
                              std::to_string(model.num_classes));
    const gp::cnn::EvalResult r = gp::cnn::evaluate(model, ds);

    std::ostringstream report;
    report << "accuracy," << r.accuracy << "\n";
    report << "class";
    for (const std::string& n : ds.class_names) report << "," << n;
    report << "\n";
    for (std::size_t row = 0; row < r.confusion.size(); ++row) {
        report << ds.class_names[row];
        for (int v : r.confusion[row]) report << "," << v;
        report << "\n";
    }
    std::cout << report.str();
    if (!a.report.empty()) {
        std::ofstream out(a.report);
        if (!out) throw gp::IoError("cannot write " + a.report);
        out << report.str();
    }
    return 0;
}

int cmd_synth(const SynthArgs& a) {
    gp::synth::write_dataset(a.out, a.cfg);
    std::cout << "wrote " << a.cfg.classes << " classes x " << a.cfg.per_class
              << " samples to " << a.out << "\n";
    return 0;
}

int cmd_calibrate(const CalibrateArgs& a) {
    gp::geom::Rect patch;
    if (std::sscanf(a.patch.c_str(), "%d,%d,%d,%d", &patch.x, &patch.y, &patch.w, &patch.h) != 4)
        throw std::invalid_argument("--patch expects x,y,w,h");
    const std::string fragment = gp::pipeline::calibrate(a.frame, patch, a.options);
    std::ofstream out(a.out);
    if (!out) throw gp::IoError("cannot write " + a.out);
    out << fragment;
    std::cout << "wrote calibration fragment to " << a.out << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"gesturepipe - gesture recognition and command dispatch pipeline"};
    app.require_subcommand(1);

    RunArgs run_args;
    auto* run = app.add_subcommand("run", "Process a recorded frame sequence");
    run->add_option("--frames", run_args.frames, "Directory of numbered .pgm/.ppm frames")
        ->required();
    run->add_option("--config", run_args.config, "Pipeline config file");
    run->add_option("--model", run_args.model, "Trained model file");
    run->add_option("--bindings", run_args.bindings, "Gesture-to-command bindings file");
    run->add_option("--classes", run_args.classes, "Class list file (default MODEL.classes)");
    run->add_option("--sink", run_args.sink, "Event sink: stdout or tcp:HOST:PORT");
    run->add_option("--log", run_args.log, "Also append events to this file");
    run->add_option("--track-csv", run_args.track_csv, "Export the cursor trajectory as CSV");
    run->add_option("--obs-log", run_args.obs_log, "Per-frame hand observation JSON log");

    TrainArgs train_args;
    auto* train = app.add_subcommand("train", "Train the gesture classifier");
    train->add_option("--data", train_args.data, "Dataset directory")->required();
    train->add_option("--out", train_args.out, "Output model path")->required();
    train->add_option("--alpha", train_args.cfg.alpha, "Base learning rate");
    train->add_option("--mu", train_args.cfg.mu, "Momentum");
    train->add_option("--epochs", train_args.cfg.epochs, "Training epochs");
    train->add_option("--batch", train_args.cfg.batch_size, "Minibatch size");
    train->add_option("--seed", train_args.cfg.seed, "RNG seed");
    train->add_option("--threads", train_args.cfg.threads, "Worker threads (0 = auto)");
    train->add_option("--val-per-class", train_args.val_per_class, "Held-out samples per class");

    EvalArgs eval_args;
    auto* eval = app.add_subcommand("eval", "Evaluate a model on a dataset");
    eval->add_option("--data", eval_args.data, "Dataset directory")->required();
    eval->add_option("--model", eval_args.model, "Model file")->required();
    eval->add_option("--report", eval_args.report, "Also write the report CSV here");

    SynthArgs synth_args;
    auto* synth = app.add_subcommand("synth", "Generate a synthetic gesture dataset");
    synth->add_option("--out", synth_args.out, "Output dataset directory")->required();
    synth->add_option("--classes", synth_args.cfg.classes, "Number of classes (2-8)");
    synth->add_option("--per-class", synth_args.cfg.per_class, "Samples per class");
    synth->add_option("--seed", synth_args.cfg.seed, "RNG seed");

    CalibrateArgs cal_args;
    auto* calibrate = app.add_subcommand("calibrate", "Build a detector config from a frame");
    calibrate->add_option("--frame", cal_args.frame, "Reference frame (P6)")->required();
    calibrate->add_option("--patch", cal_args.patch, "Hand-color patch as x,y,w,h")->required();
    calibrate->add_option("--out", cal_args.out, "Output config fragment")->required();
    calibrate->add_option("--hue-margin", cal_args.options.hue_margin, "Hue padding");
    calibrate->add_option("--sat-margin", cal_args.options.sat_margin, "Saturation padding");
    calibrate->add_option("--val-margin", cal_args.options.val_margin, "Value padding");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (run->parsed()) return cmd_run(run_args);
        if (train->parsed()) return cmd_train(train_args);
        if (eval->parsed()) return cmd_eval(eval_args);
        if (synth->parsed()) return cmd_synth(synth_args);
        if (calibrate->parsed()) return cmd_calibrate(cal_args);
    } catch (const gp::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const gp::cnn::ModelFormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const gp::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
