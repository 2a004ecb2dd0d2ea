#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>

#include "rustico/cosfire.hpp"
#include "rustico/datasets.hpp"
#include "rustico/dog.hpp"
#include "rustico/image.hpp"
#include "rustico/metrics.hpp"
#include "rustico/rustico.hpp"
#include "rustico/version.hpp"

namespace py = pybind11;
using namespace rustico;

namespace {

GrayImage to_image(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
    if (a.ndim() != 2)
        throw std::invalid_argument("expected a 2-D float array (rows, cols)");
    GrayImage img(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)));
    std::memcpy(img.data.data(), a.data(), img.size() * sizeof(double));
    return img;
}

py::array_t<double> from_image(const GrayImage& img) {
    py::array_t<double> a({img.height, img.width});
    std::memcpy(a.mutable_data(), img.data.data(), img.size() * sizeof(double));
    return a;
}

BinaryMask to_mask(const py::array_t<bool, py::array::c_style | py::array::forcecast>& a) {
    if (a.ndim() != 2)
        throw std::invalid_argument("expected a 2-D bool array (rows, cols)");
    BinaryMask m(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)));
    const bool* src = a.data();
    for (std::size_t i = 0; i < m.size(); ++i)
        m.bits[i] = src[i] ? 1 : 0;
    return m;
}

py::array_t<bool> from_mask(const BinaryMask& m) {
    py::array_t<bool> a({m.height, m.width});
    bool* dst = a.mutable_data();
    for (std::size_t i = 0; i < m.size(); ++i)
        dst[i] = m.bits[i] != 0;
    return a;
}

Kernel2D to_kernel(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
    if (a.ndim() != 2 || a.shape(0) != a.shape(1) || a.shape(0) % 2 == 0)
        throw std::invalid_argument("kernel must be a square array with odd side");
    Kernel2D k;
    k.radius = static_cast<int>(a.shape(0) / 2);
    k.weights.resize(static_cast<std::size_t>(a.shape(0)) * a.shape(0));
    std::memcpy(k.weights.data(), a.data(), k.weights.size() * sizeof(double));
    return k;
}

py::array_t<double> from_kernel(const Kernel2D& k) {
    py::array_t<double> a({k.side(), k.side()});
    std::memcpy(a.mutable_data(), k.weights.data(), k.weights.size() * sizeof(double));
    return a;
}

DistanceMetric metric_from(const std::string& name) {
    if (name == "euclidean")
        return DistanceMetric::euclidean;
    if (name == "chebyshev")
        return DistanceMetric::chebyshev;
    throw std::invalid_argument("distance must be 'euclidean' or 'chebyshev'");
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "B-COSFIRE / RUSTICO curvilinear-structure delineation";
    m.attr("__version__") = kVersion;

    py::class_<Tuple4>(m, "Tuple4")
        .def(py::init([](int delta, double sigma, double rho, double phi) {
                 return Tuple4{delta, sigma, rho, wrap_angle(phi)};
             }),
             py::arg("delta"), py::arg("sigma"), py::arg("rho"), py::arg("phi"))
        .def_readonly("delta", &Tuple4::delta)
        .def_readonly("sigma", &Tuple4::sigma)
        .def_readonly("rho", &Tuple4::rho)
        .def_readonly("phi", &Tuple4::phi)
        .def("__repr__", [](const Tuple4& t) {
            return "Tuple4(delta=" + std::to_string(t.delta) + ", sigma=" + std::to_string(t.sigma) +
                   ", rho=" + std::to_string(t.rho) + ", phi=" + std::to_string(t.phi) + ")";
        });

    py::class_<CosfireFilter>(m, "CosfireFilter")
        .def(py::init([](std::vector<Tuple4> tuples, double sigma0, double alpha) {
                 CosfireFilter f{std::move(tuples), sigma0, alpha};
                 sort_tuples(f.tuples);
                 validate(f);
                 return f;
             }),
             py::arg("tuples"), py::arg("sigma0"), py::arg("alpha") = 0.0)
        .def_readonly("tuples", &CosfireFilter::tuples)
        .def_readonly("sigma0", &CosfireFilter::sigma0)
        .def_readonly("alpha", &CosfireFilter::alpha)
        .def("__len__", [](const CosfireFilter& f) { return f.tuples.size(); })
        .def("rotate", &rotate_filter, py::arg("psi"))
        .def("to_json", &filter_to_json)
        .def_static("from_json", &filter_from_json, py::arg("text"))
        .def("save", &save_filter, py::arg("path"))
        .def_static("load", &load_filter, py::arg("path"));

    py::class_<RusticoOperator>(m, "RusticoOperator")
        .def(py::init([](const CosfireFilter& f, double lam, double xi, int orientations) {
                 return make_operator(f, lam, xi, orientation_set(orientations));
             }),
             py::arg("excitatory"), py::arg("lambda_"), py::arg("xi"),
             py::arg("orientations") = 12)
        .def_readonly("excitatory", &RusticoOperator::excitatory)
        .def_readonly("inhibitory", &RusticoOperator::inhibitory)
        .def_readonly("lambda_", &RusticoOperator::lambda)
        .def_readonly("xi", &RusticoOperator::xi)
        .def_readonly("orientations", &RusticoOperator::orientations)
        .def("to_json", &operator_to_json)
        .def_static("from_json", &operator_from_json, py::arg("text"));

    // raster ops
    m.def("gaussian_kernel", [](double sigma) { return from_kernel(gaussian_kernel(sigma)); },
          py::arg("sigma"));
    m.def("gaussian_blur",
          [](const py::array_t<double, py::array::c_style | py::array::forcecast>& img,
             double sigma) { return from_image(gaussian_blur(to_image(img), sigma)); },
          py::arg("image"), py::arg("sigma"));
    m.def("convolve",
          [](const py::array_t<double, py::array::c_style | py::array::forcecast>& img,
             const py::array_t<double, py::array::c_style | py::array::forcecast>& k) {
              return from_image(convolve(to_image(img), to_kernel(k)));
          },
          py::arg("image"), py::arg("kernel"));
    m.def("rectify",
          [](const py::array_t<double, py::array::c_style | py::array::forcecast>& img) {
              return from_image(rectify(to_image(img)));
          },
          py::arg("image"));
    m.def("shift",
          [](const py::array_t<double, py::array::c_style | py::array::forcecast>& img,
             double rho, double angle) { return from_image(shift(to_image(img), rho, angle)); },
          py::arg("image"), py::arg("rho"), py::arg("angle"));

    // DoG
    m.def("dog_kernel",
          [](int delta, double sigma) { return from_kernel(dog_kernel({delta, sigma})); },
          py::arg("delta"), py::arg("sigma"));
    m.def("dog_response",
          [](const py::array_t<double, py::array::c_style | py::array::forcecast>& img, int delta,
             double sigma) { return from_image(dog_response(to_image(img), {delta, sigma})); },
          py::arg("image"), py::arg("delta"), py::arg("sigma"));

    // configuration and responses
    m.def("render_bar_prototype",
          [](int length, int width, int canvas) {
              return from_image(render_bar_prototype(length, width, canvas));
          },
          py::arg("length"), py::arg("width"), py::arg("canvas"));
    m.def("configure",
          [](const py::array_t<double, py::array::c_style | py::array::forcecast>& proto,
             int delta, double sigma, const std::vector<double>& radii, double fraction,
             double sigma0, double alpha) {
              ConfigureParams params;
              params.sigma0 = sigma0;
              params.alpha = alpha;
              return configure(to_image(proto), {delta, sigma}, radii, fraction, params);
          },
          py::arg("prototype"), py::arg("delta"), py::arg("sigma"), py::arg("radii"),
          py::arg("fraction") = 0.2, py::arg("sigma0") = 1.0, py::arg("alpha") = 0.0);
    m.def("derive_inhibitor", &derive_inhibitor, py::arg("excitatory"), py::arg("lambda_"));
    m.def("response",
          [](const CosfireFilter& f,
             const py::array_t<double, py::array::c_style | py::array::forcecast>& img) {
              return from_image(response(f, to_image(img)));
          },
          py::arg("filter"), py::arg("image"));
    m.def("multi_orientation_cosfire",
          [](const CosfireFilter& f, int orientations,
             const py::array_t<double, py::array::c_style | py::array::forcecast>& img,
             int jobs) {
              return from_image(multi_orientation_response(f, orientation_set(orientations),
                                                           to_image(img), jobs));
          },
          py::arg("filter"), py::arg("orientations"), py::arg("image"), py::arg("jobs") = 0);
    m.def("rustico_response",
          [](const RusticoOperator& op, double psi,
             const py::array_t<double, py::array::c_style | py::array::forcecast>& img) {
              return from_image(rustico_response(op, psi, to_image(img)));
          },
          py::arg("operator"), py::arg("psi"), py::arg("image"));
    m.def("multi_orientation_response",
          [](const RusticoOperator& op,
             const py::array_t<double, py::array::c_style | py::array::forcecast>& img,
             int jobs) { return from_image(multi_orientation_response(op, to_image(img), jobs)); },
          py::arg("operator"), py::arg("image"), py::arg("jobs") = 0);
    m.def("orientation_set", &orientation_set, py::arg("n"));

    // evaluation
    m.def("threshold_map",
          [](const py::array_t<double, py::array::c_style | py::array::forcecast>& resp,
             double t) { return from_mask(threshold_map(to_image(resp), t)); },
          py::arg("response"), py::arg("t"));
    m.def("threshold_grid", &threshold_grid);
    m.def("centerline_prf",
          [](const py::array_t<bool, py::array::c_style | py::array::forcecast>& det,
             const py::array_t<bool, py::array::c_style | py::array::forcecast>& gt,
             double d_star, const std::string& distance) {
              const Prf s = centerline_prf(to_mask(det), to_mask(gt), d_star,
                                           metric_from(distance));
              return py::make_tuple(s.precision, s.recall, s.f);
          },
          py::arg("detected"), py::arg("ground_truth"), py::arg("d_star"),
          py::arg("distance") = "euclidean");
    m.def("sweep_thresholds",
          [](const std::vector<py::array_t<double, py::array::c_style | py::array::forcecast>>&
                 responses,
             const std::vector<py::array_t<bool, py::array::c_style | py::array::forcecast>>& gts,
             double d_star, const std::string& distance) {
              std::vector<GrayImage> imgs;
              std::vector<BinaryMask> masks;
              for (const auto& r : responses)
                  imgs.push_back(to_image(r));
              for (const auto& g : gts)
                  masks.push_back(to_mask(g));
              std::vector<const GrayImage*> ip;
              std::vector<const BinaryMask*> mp;
              for (const auto& i : imgs)
                  ip.push_back(&i);
              for (const auto& g : masks)
                  mp.push_back(&g);
              const SweepResult r = sweep_thresholds(ip, mp, d_star, metric_from(distance));
              py::dict out;
              out["t_star"] = r.t_star;
              out["avg_precision"] = r.avg_precision;
              out["avg_recall"] = r.avg_recall;
              out["avg_f"] = r.avg_f;
              py::list per_image;
              for (const Prf& s : r.per_image)
                  per_image.append(py::make_tuple(s.precision, s.recall, s.f));
              out["per_image"] = per_image;
              return out;
          },
          py::arg("responses"), py::arg("ground_truths"), py::arg("d_star"),
          py::arg("distance") = "euclidean");
    m.def("mcc",
          [](const py::array_t<bool, py::array::c_style | py::array::forcecast>& pred,
             const py::array_t<bool, py::array::c_style | py::array::forcecast>& gt,
             const py::object& fov) {
              if (fov.is_none())
                  return mcc(to_mask(pred), to_mask(gt));
              const BinaryMask fmask =
                  to_mask(fov.cast<py::array_t<bool, py::array::c_style | py::array::forcecast>>());
              return mcc(to_mask(pred), to_mask(gt), &fmask);
          },
          py::arg("prediction"), py::arg("ground_truth"), py::arg("fov") = py::none());
    m.def("cal",
          [](const py::array_t<bool, py::array::c_style | py::array::forcecast>& pred,
             const py::array_t<bool, py::array::c_style | py::array::forcecast>& gt, double alpha,
             double beta) {
              const CalResult r = cal(to_mask(pred), to_mask(gt), alpha, beta);
              return py::make_tuple(r.c, r.a, r.l, r.cal);
          },
          py::arg("prediction"), py::arg("ground_truth"), py::arg("alpha") = 2.0,
          py::arg("beta") = 2.0);
    m.def("skeletonize",
          [](const py::array_t<bool, py::array::c_style | py::array::forcecast>& mask) {
              return from_mask(skeletonize(to_mask(mask)));
          },
          py::arg("mask"));
    m.def("dilate_disk",
          [](const py::array_t<bool, py::array::c_style | py::array::forcecast>& mask,
             double radius) { return from_mask(dilate_disk(to_mask(mask), radius)); },
          py::arg("mask"), py::arg("radius"));
    m.def("count_components",
          [](const py::array_t<bool, py::array::c_style | py::array::forcecast>& mask) {
              return count_components(to_mask(mask));
          },
          py::arg("mask"));
    m.def("wilcoxon_signed_rank", &wilcoxon_signed_rank, py::arg("a"), py::arg("b"));

    // synthetic fixtures
    auto fixture_tuple = [](const Fixture& fx) {
        return py::make_tuple(from_image(fx.image), from_mask(fx.gt), from_mask(fx.region));
    };
    m.def("make_bar_fixture",
          [fixture_tuple](int canvas, int length, int width, double angle) {
              return fixture_tuple(make_bar_fixture(canvas, length, width, angle));
          },
          py::arg("canvas"), py::arg("length"), py::arg("width"), py::arg("angle") = 0.0);
    m.def("make_crossed_bars_fixture",
          [fixture_tuple](int canvas, int length, int width, double angle_a, double angle_b) {
              return fixture_tuple(
                  make_crossed_bars_fixture(canvas, length, width, angle_a, angle_b));
          },
          py::arg("canvas"), py::arg("length"), py::arg("width"), py::arg("angle_a") = 0.0,
          py::arg("angle_b") = 1.5707963267948966);
    m.def("make_bar_plus_texture_fixture",
          [fixture_tuple](int width, int height, int bar_length, int bar_width, int square) {
              return fixture_tuple(
                  make_bar_plus_texture_fixture(width, height, bar_length, bar_width, square));
          },
          py::arg("width"), py::arg("height"), py::arg("bar_length"), py::arg("bar_width") = 3,
          py::arg("square") = 2);
    m.def("make_curve_fixture",
          [fixture_tuple](int canvas, double radius, int width) {
              return fixture_tuple(make_curve_fixture(canvas, radius, width));
          },
          py::arg("canvas"), py::arg("radius"), py::arg("width") = 3);
}
