#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gesturepipe/dataset.hpp"
#include "gesturepipe/pipeline.hpp"
#include "gesturepipe/synth.hpp"

namespace py = pybind11;
using namespace gp;

namespace {

using U8Array = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;

BinaryMask mask_from_array(const U8Array& a) {
    if (a.ndim() != 2) throw std::invalid_argument("mask must be a 2-D uint8 array");
    BinaryMask m(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)));
    auto r = a.unchecked<2>();
    for (py::ssize_t y = 0; y < a.shape(0); ++y)
        for (py::ssize_t x = 0; x < a.shape(1); ++x)
            m.set(static_cast<int>(x), static_cast<int>(y), r(y, x) != 0);
    return m;
}

py::array_t<std::uint8_t> mask_to_array(const BinaryMask& m) {
    py::array_t<std::uint8_t> out({m.height, m.width});
    auto w = out.mutable_unchecked<2>();
    for (int y = 0; y < m.height; ++y)
        for (int x = 0; x < m.width; ++x) w(y, x) = m.at(x, y) ? 1 : 0;
    return out;
}

Frame frame_from_array(const U8Array& a) {
    if (a.ndim() == 2) {
        Frame f = Frame::gray(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)));
        auto r = a.unchecked<2>();
        for (py::ssize_t y = 0; y < a.shape(0); ++y)
            for (py::ssize_t x = 0; x < a.shape(1); ++x)
                f.at(static_cast<int>(x), static_cast<int>(y)) = r(y, x);
        return f;
    }
    if (a.ndim() == 3 && a.shape(2) == 3) {
        Frame f = Frame::rgb(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)));
        auto r = a.unchecked<3>();
        for (py::ssize_t y = 0; y < a.shape(0); ++y)
            for (py::ssize_t x = 0; x < a.shape(1); ++x)
                for (int c = 0; c < 3; ++c)
                    f.at(static_cast<int>(x), static_cast<int>(y), c) = r(y, x, c);
        return f;
    }
    throw std::invalid_argument("frame must be (h, w) or (h, w, 3) uint8");
}

py::array_t<std::uint8_t> frame_to_array(const Frame& f) {
    if (f.channels == 1) {
        py::array_t<std::uint8_t> out({f.height, f.width});
        auto w = out.mutable_unchecked<2>();
        for (int y = 0; y < f.height; ++y)
            for (int x = 0; x < f.width; ++x) w(y, x) = f.at(x, y);
        return out;
    }
    py::array_t<std::uint8_t> out({f.height, f.width, 3});
    auto w = out.mutable_unchecked<3>();
    for (int y = 0; y < f.height; ++y)
        for (int x = 0; x < f.width; ++x)
            for (int c = 0; c < 3; ++c) w(y, x, c) = f.at(x, y, c);
    return out;
}

respond::CommandKind kind_from_string(const std::string& s) {
    if (s == "durative") return respond::CommandKind::Durative;
    if (s == "instant") return respond::CommandKind::Instant;
    throw std::invalid_argument("kind must be 'durative' or 'instant'");
}

// Responder with string labels, convenient from python.
class PyResponder {
public:
    PyResponder(const std::vector<std::tuple<std::string, std::string, std::string>>& bindings,
                const std::vector<std::string>& classes, int window, double tau)
        : classes_(classes),
          bindings_([&] {
              std::vector<respond::CommandBinding> bs;
              for (const auto& [g, c, k] : bindings) bs.push_back({g, c, kind_from_string(k)});
              return respond::BindingSet(bs, classes);
          }()),
          responder_(bindings_, respond::ResponderConfig{window, tau}) {}

    std::vector<py::dict> step(const py::object& label) {
        int id = respond::kNoHand;
        if (!label.is_none()) {
            const std::string name = py::cast<std::string>(label);
            const auto it = std::find(classes_.begin(), classes_.end(), name);
            if (it == classes_.end()) throw std::invalid_argument("unknown gesture " + name);
            id = static_cast<int>(it - classes_.begin());
        }
        std::vector<py::dict> out;
        for (const respond::Event& e : responder_.step(id)) {
            py::dict d;
            d["type"] = e.type == respond::EventType::Activate   ? "activate"
                        : e.type == respond::EventType::Release ? "release"
                                                                : "fire";
            d["command"] = bindings_.command_name(e.command);
            d["confidence"] = e.confidence;
            out.push_back(std::move(d));
        }
        return out;
    }

private:
    std::vector<std::string> classes_;
    respond::BindingSet bindings_;
    respond::Responder responder_;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "gesturepipe: gesture recognition and command dispatch pipeline";

    // --- imgproc ---
    m.def("to_gray",
          [](const U8Array& a) { return frame_to_array(to_gray(frame_from_array(a))); });
    m.def(
        "gaussian_blur",
        [](const U8Array& a, double sigma, int radius) {
            return frame_to_array(imgproc::gaussian_blur(frame_from_array(a), sigma, radius));
        },
        py::arg("frame"), py::arg("sigma") = 2.0, py::arg("radius") = 2);
    m.def("otsu_threshold",
          [](const U8Array& a) { return imgproc::otsu_threshold(frame_from_array(a)); });
    m.def("threshold_otsu", [](const U8Array& a) {
        return mask_to_array(imgproc::threshold_otsu(frame_from_array(a)));
    });
    m.def(
        "threshold_fixed",
        [](const U8Array& a, int t) {
            return mask_to_array(imgproc::threshold_fixed(frame_from_array(a), t));
        },
        py::arg("frame"), py::arg("t"));
    m.def(
        "morphology",
        [](const U8Array& a, const std::string& op, int radius) {
            imgproc::MorphOp kind;
            if (op == "open") kind = imgproc::MorphOp::Open;
            else if (op == "close") kind = imgproc::MorphOp::Close;
            else throw std::invalid_argument("op must be 'open' or 'close'");
            return mask_to_array(imgproc::morphology(mask_from_array(a), kind, radius));
        },
        py::arg("mask"), py::arg("op"), py::arg("radius") = 1);
    m.def(
        "color_filter",
        [](const U8Array& a, int h_lo, int h_hi, int s_lo, int s_hi, int v_lo, int v_hi) {
            imgproc::ColorRange r;
            r.h_lo = static_cast<std::uint8_t>(h_lo);
            r.h_hi = static_cast<std::uint8_t>(h_hi);
            r.s_lo = static_cast<std::uint8_t>(s_lo);
            r.s_hi = static_cast<std::uint8_t>(s_hi);
            r.v_lo = static_cast<std::uint8_t>(v_lo);
            r.v_hi = static_cast<std::uint8_t>(v_hi);
            return mask_to_array(imgproc::color_filter(frame_from_array(a), r));
        },
        py::arg("frame"), py::arg("h_lo") = 0, py::arg("h_hi") = 179, py::arg("s_lo") = 0,
        py::arg("s_hi") = 255, py::arg("v_lo") = 0, py::arg("v_hi") = 255);
    m.def(
        "subtract_background",
        [](const U8Array& frame, const U8Array& reference, int diff_threshold) {
            imgproc::BackgroundModel model{to_gray(frame_from_array(reference)), diff_threshold};
            return mask_to_array(imgproc::subtract_background(frame_from_array(frame), model));
        },
        py::arg("frame"), py::arg("reference"), py::arg("diff_threshold") = 30);

    // --- hand geometry ---
    py::class_<handgeom::HandObservation>(m, "HandObservation")
        .def_property_readonly("center",
                               [](const handgeom::HandObservation& o) {
                                   return py::make_tuple(o.center.x, o.center.y);
                               })
        .def_readonly("palm_radius", &handgeom::HandObservation::palm_radius)
        .def_property_readonly("fingertips",
                               [](const handgeom::HandObservation& o) {
                                   py::list tips;
                                   for (const auto& t : o.fingertips)
                                       tips.append(py::make_tuple(t.x, t.y));
                                   return tips;
                               })
        .def_property_readonly("tracked_point",
                               [](const handgeom::HandObservation& o) {
                                   return py::make_tuple(o.tracked_point.x, o.tracked_point.y);
                               })
        .def_property_readonly("canvas", [](const handgeom::HandObservation& o) {
            return mask_to_array(o.canvas);
        });

    m.def(
        "analyze_hand",
        [](const U8Array& mask, int min_area) -> py::object {
            handgeom::Config cfg;
            cfg.min_area = min_area;
            const auto obs = handgeom::analyze(mask_from_array(mask), cfg);
            if (!obs) return py::none();
            return py::cast(*obs);
        },
        py::arg("mask"), py::arg("min_area") = 1000);
    m.def(
        "distance_transform",
        [](const U8Array& mask) {
            const auto dt = geom::distance_transform(mask_from_array(mask));
            py::array_t<double> out({dt.height, dt.width});
            auto w = out.mutable_unchecked<2>();
            for (int y = 0; y < dt.height; ++y)
                for (int x = 0; x < dt.width; ++x) w(y, x) = dt.at(x, y);
            return out;
        },
        py::arg("mask"));
    m.def(
        "normalize_canvas",
        [](const U8Array& mask, int side) {
            return mask_to_array(handgeom::normalize_canvas(mask_from_array(mask), side));
        },
        py::arg("mask"), py::arg("side") = 64);

    // --- classifier ---
    py::class_<cnn::CnnModel>(m, "CnnModel")
        .def_static("load", &cnn::load_model, py::arg("path"))
        .def("save",
             [](const cnn::CnnModel& m_, const std::string& p) { cnn::save_model(m_, p); })
        .def_property_readonly("num_classes",
                               [](const cnn::CnnModel& m_) { return m_.num_classes; })
        .def("forward", [](const cnn::CnnModel& m_, const U8Array& canvas) {
            const cnn::GestureScores s = cnn::forward(m_, mask_from_array(canvas));
            py::array_t<float> probs(static_cast<py::ssize_t>(s.probabilities.size()));
            std::copy(s.probabilities.begin(), s.probabilities.end(), probs.mutable_data());
            return py::make_tuple(s.label, probs);
        });

    m.def(
        "train_model",
        [](const std::string& data_dir, const std::string& out_path, double alpha, double mu,
           int epochs, int batch, std::uint64_t seed, int threads, int val_per_class) {
            const cnn::LabeledDataset full = cnn::load_dataset(data_dir);
            const auto [tr, val] = cnn::split_dataset(full, val_per_class, seed);
            cnn::TrainConfig cfg;
            cfg.alpha = alpha;
            cfg.mu = mu;
            cfg.epochs = epochs;
            cfg.batch_size = batch;
            cfg.seed = seed;
            cfg.threads = threads;
            const cnn::TrainResult r = cnn::train(tr, val, cfg);
            cnn::save_model(r.model, out_path);
            pipeline::save_class_names(full.class_names, out_path + ".classes");
            py::dict d;
            d["loss"] = r.epoch_loss;
            d["val_accuracy"] = r.val_accuracy;
            d["classes"] = full.class_names;
            return d;
        },
        py::arg("data_dir"), py::arg("out_path"), py::arg("alpha") = 1e-4, py::arg("mu") = 0.9,
        py::arg("epochs") = 30, py::arg("batch") = 32, py::arg("seed") = 1,
        py::arg("threads") = 0, py::arg("val_per_class") = 50);
    m.def(
        "evaluate_model",
        [](const std::string& data_dir, const std::string& model_path) {
            const cnn::CnnModel model = cnn::load_model(model_path);
            const cnn::LabeledDataset ds = cnn::load_dataset(data_dir);
            const cnn::EvalResult r = cnn::evaluate(model, ds);
            py::dict d;
            d["accuracy"] = r.accuracy;
            d["confusion"] = r.confusion;
            d["classes"] = ds.class_names;
            return d;
        },
        py::arg("data_dir"), py::arg("model_path"));

    // --- tracking ---
    py::class_<track::PointTracker>(m, "PointTracker")
        .def(py::init([](double q_pos, double q_vel, double r_meas, double p0, int max_coast) {
                 return track::PointTracker(
                     track::KalmanConfig{q_pos, q_vel, r_meas, p0, max_coast});
             }),
             py::arg("q_pos") = 1e-2, py::arg("q_vel") = 1e-1, py::arg("r_meas") = 4.0,
             py::arg("p0") = 100.0, py::arg("max_coast") = 5)
        .def("feed", [](track::PointTracker& t, const py::object& meas) -> py::object {
            std::optional<track::Vec2> m_;
            if (!meas.is_none()) {
                const auto xy = py::cast<std::pair<double, double>>(meas);
                m_ = track::Vec2{xy.first, xy.second};
            }
            const auto out = t.feed(m_);
            if (!out) return py::none();
            return py::make_tuple(out->x, out->y);
        });
    m.def(
        "map_to_screen",
        [](double x, double y, std::tuple<int, int, int, int> active, std::tuple<int, int> screen,
           double gain) {
            track::ScreenMap map;
            map.active = {std::get<0>(active), std::get<1>(active), std::get<2>(active),
                          std::get<3>(active)};
            map.screen_w = std::get<0>(screen);
            map.screen_h = std::get<1>(screen);
            map.gain = gain;
            const geom::Pt p = track::map_to_screen({x, y}, map);
            return py::make_tuple(p.x, p.y);
        },
        py::arg("x"), py::arg("y"), py::arg("active") = std::make_tuple(0, 0, 640, 480),
        py::arg("screen") = std::make_tuple(1920, 1080), py::arg("gain") = 1.0);

    // --- responder ---
    py::class_<PyResponder>(m, "Responder")
        .def(py::init<const std::vector<std::tuple<std::string, std::string, std::string>>&,
                      const std::vector<std::string>&, int, double>(),
             py::arg("bindings"), py::arg("classes"), py::arg("window") = 10,
             py::arg("tau") = 0.7)
        .def("step", &PyResponder::step, py::arg("label"));

    // --- synthetic data ---
    m.def("class_names", &synth::class_names, py::arg("count") = 8);
    m.def(
        "render_silhouette",
        [](int class_id, int width, int height, double cx, double cy, double radius, double dx,
           double dy, double scale, double rot_deg) {
            return mask_to_array(synth::render_silhouette(class_id, width, height, cx, cy,
                                                          radius, {dx, dy, scale, rot_deg}));
        },
        py::arg("class_id"), py::arg("width") = 160, py::arg("height") = 160, py::arg("cx") = 80,
        py::arg("cy") = 100, py::arg("radius") = 34, py::arg("dx") = 0, py::arg("dy") = 0,
        py::arg("scale") = 1.0, py::arg("rot_deg") = 0.0);
    m.def(
        "write_dataset",
        [](const std::string& out_dir, int classes, int per_class, std::uint64_t seed) {
            synth::SynthConfig cfg;
            cfg.classes = classes;
            cfg.per_class = per_class;
            cfg.seed = seed;
            synth::write_dataset(out_dir, cfg);
        },
        py::arg("out_dir"), py::arg("classes") = 8, py::arg("per_class") = 300,
        py::arg("seed") = 1);

    // --- pipeline ---
    m.def(
        "run_pipeline",
        [](const std::string& frames_dir, const std::string& model_path,
           const std::string& bindings_path, const std::string& classes_path,
           const std::string& config_path, const std::string& log_path) {
            PipelineConfig cfg =
                config_path.empty() ? PipelineConfig{} : load_config(config_path);
            const cnn::CnnModel model = cnn::load_model(model_path);
            const std::string classes_file =
                classes_path.empty() ? model_path + ".classes" : classes_path;
            const auto classes = pipeline::load_class_names(classes_file);
            const respond::BindingSet bindings(respond::BindingSet::parse_file(bindings_path),
                                               classes);
            pipeline::Pipeline p(cfg, model, classes, bindings);

            std::vector<std::unique_ptr<events::EventSink>> owned;
            if (!log_path.empty()) owned.push_back(std::make_unique<events::FileSink>(log_path));
            pipeline::RunOptions opt;
            opt.frames_dir = frames_dir;
            for (auto& s : owned) opt.sinks.push_back(s.get());
            const pipeline::RunStats stats = pipeline::run(p, opt);
            py::dict d;
            d["frames"] = stats.frames;
            d["skipped"] = stats.skipped;
            d["command_events"] = stats.command_events;
            d["p95_latency_ms"] = stats.p95_latency_ms;
            return d;
        },
        py::arg("frames_dir"), py::arg("model_path"), py::arg("bindings_path"),
        py::arg("classes_path") = "", py::arg("config_path") = "", py::arg("log_path") = "");
    m.def(
        "calibrate",
        [](const std::string& frame_path, std::tuple<int, int, int, int> patch) {
            return pipeline::calibrate(frame_path,
                                       {std::get<0>(patch), std::get<1>(patch),
                                        std::get<2>(patch), std::get<3>(patch)});
        },
        py::arg("frame_path"), py::arg("patch"));

    // --- image io ---
    m.def("load_netpbm",
          [](const std::string& path) { return frame_to_array(load_netpbm(path)); });
    m.def("save_netpbm", [](const U8Array& a, const std::string& path) {
        save_netpbm(frame_from_array(a), path);
    });
}
