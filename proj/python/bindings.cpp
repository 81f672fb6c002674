#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "csalsa/config.hpp"
#include "csalsa/harness.hpp"
#include "csalsa/validate.hpp"

namespace py = pybind11;
using namespace csalsa;
using namespace pybind11::literals;

namespace {

using CArray = py::array_t<cplx, py::array::c_style | py::array::forcecast>;
using RArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

CVec to_cvec(const CArray& a)
{
    return CVec(a.data(), a.data() + a.size());
}

ImageGrid to_image(const RArray& a)
{
    if (a.ndim() != 2) throw DomainError("expected a 2-D array");
    const Shape s{static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1))};
    return ImageGrid(s, RVec(a.data(), a.data() + a.size()));
}

Mask to_mask(const py::array_t<bool, py::array::c_style | py::array::forcecast>& a)
{
    if (a.ndim() != 2) throw DomainError("expected a 2-D mask");
    Mask m(Shape{static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1))});
    for (py::ssize_t i = 0; i < a.size(); ++i) m[static_cast<std::size_t>(i)] = a.data()[i] ? 1 : 0;
    return m;
}

py::array_t<cplx> from_cvec(const CVec& v)
{
    py::array_t<cplx> out(static_cast<py::ssize_t>(v.size()));
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

py::array_t<double> from_image(const ImageGrid& g)
{
    py::array_t<double> out({static_cast<py::ssize_t>(g.height()), static_cast<py::ssize_t>(g.width())});
    std::copy(g.values().begin(), g.values().end(), out.mutable_data());
    return out;
}

py::array_t<bool> from_mask(const Mask& m)
{
    py::array_t<bool> out({static_cast<py::ssize_t>(m.height()), static_cast<py::ssize_t>(m.width())});
    for (std::size_t i = 0; i < m.size(); ++i) out.mutable_data()[i] = m[i] != 0;
    return out;
}

py::dict history_dict(const std::vector<IterationRecord>& h)
{
    std::vector<int> k;
    std::vector<double> obj, con, res, err;
    for (const IterationRecord& r : h) {
        k.push_back(r.k);
        obj.push_back(r.objective);
        con.push_back(r.constraint_norm);
        res.push_back(r.primal_residual);
        err.push_back(r.mse.value_or(std::nan("")));
    }
    return py::dict("k"_a = py::array(py::cast(k)), "objective"_a = py::array(py::cast(obj)),
                    "constraint_norm"_a = py::array(py::cast(con)), "primal_residual"_a = py::array(py::cast(res)),
                    "mse"_a = py::array(py::cast(err)));
}

py::dict result_dict(const SolveResult& r)
{
    return py::dict("status"_a = to_string(r.status), "iterations"_a = r.iterations, "solution"_a = from_cvec(r.solution),
                    "image"_a = from_cvec(r.image), "history"_a = history_dict(r.history));
}

SolverConfig solver_config(double mu, double epsilon, int max_iterations, bool warm_start, bool stop_on_convergence)
{
    SolverConfig c;
    c.mu = mu;
    c.epsilon = epsilon;
    c.max_iterations = max_iterations;
    c.warm_start_adjoint = warm_start;
    c.stop_on_convergence = stop_on_convergence;
    return c;
}

std::string setting_text(const py::handle& v)
{
    if (py::isinstance<py::bool_>(v)) return v.cast<bool>() ? "true" : "false";
    if (py::isinstance<py::float_>(v)) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", v.cast<double>());
        return buf;
    }
    return py::str(v).cast<std::string>();
}

}  // namespace

PYBIND11_MODULE(_csalsa, m)
{
    m.doc() = "C-SALSA solvers for min phi(x) subject to ||Bx - y|| <= epsilon";

    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<CapabilityError>(m, "CapabilityError", PyExc_NotImplementedError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<DivergenceError>(m, "DivergenceError", PyExc_ArithmeticError);

    // ---- operators and frames ----
    py::class_<Frame>(m, "Frame")
        .def(py::init([](const std::string& family, int levels, std::pair<std::size_t, std::size_t> shape) {
                 return Frame(parse_frame_family(family), levels, Shape{shape.first, shape.second});
             }),
             "family"_a = "undecimated", "levels"_a = 4, "shape"_a)
        .def_property_readonly("family", [](const Frame& f) { return to_string(f.family()); })
        .def_property_readonly("levels", &Frame::levels)
        .def_property_readonly("coefficient_size", &Frame::coefficient_size)
        .def("analysis", [](const Frame& f, const CArray& x) { return from_cvec(f.analysis(to_cvec(x))); })
        .def("synthesis", [](const Frame& f, const CArray& b) { return from_cvec(f.synthesis(to_cvec(b))); });

    py::class_<LinearOperator>(m, "LinearOperator")
        .def_static("convolution", [](const RArray& k, std::pair<std::size_t, std::size_t> shape) {
            return LinearOperator::convolution(to_image(k), Shape{shape.first, shape.second});
        }, "kernel"_a, "shape"_a)
        .def_static("pixel_mask", [](const py::array_t<bool, py::array::c_style | py::array::forcecast>& mask) {
            return LinearOperator::pixel_mask(to_mask(mask));
        }, "mask"_a)
        .def_static("partial_fourier", [](const py::array_t<bool, py::array::c_style | py::array::forcecast>& mask) {
            return LinearOperator::partial_fourier(to_mask(mask));
        }, "mask"_a, "Mask in DFT order (DC at [0, 0]).")
        .def("composed_with", &LinearOperator::composed_with, "frame"_a)
        .def_property_readonly("kind", [](const LinearOperator& op) { return to_string(op.kind()); })
        .def_property_readonly("domain_size", &LinearOperator::domain_size)
        .def_property_readonly("range_size", &LinearOperator::range_size)
        .def("forward", [](const LinearOperator& op, const CArray& x) { return from_cvec(op.forward(to_cvec(x))); })
        .def("adjoint", [](const LinearOperator& op, const CArray& r) { return from_cvec(op.adjoint(to_cvec(r))); })
        .def("shifted_normal_inverse", [](const LinearOperator& op, const CArray& r) {
            return from_cvec(op.shifted_normal_inverse(to_cvec(r)));
        }, "(I + A^H A)^{-1} r");

    m.def("add_noise", [](const CArray& y, double sigma, std::uint64_t seed, bool complex_noise) {
        return from_cvec(add_noise(to_cvec(y), sigma, seed, complex_noise));
    }, "y"_a, "sigma"_a, "seed"_a, "complex_noise"_a = false);

    // ---- prox ----
    m.def("soft_threshold", [](const CArray& v, double tau) { return from_cvec(soft_threshold(to_cvec(v), tau)); },
          "v"_a, "tau"_a);
    m.def("project_ball", [](const CArray& s, const CArray& center, double radius) {
        return from_cvec(project_ball(to_cvec(s), BallConstraint{to_cvec(center), radius}));
    }, "s"_a, "center"_a, "radius"_a);
    m.def("tv_prox", [](const RArray& v, double tau, int inner_iterations, double dual_step) {
        return from_image(tv_prox(to_image(v), tau, TvSettings{inner_iterations, dual_step, false}));
    }, "v"_a, "tau"_a, "inner_iterations"_a = 5, "dual_step"_a = 0.248);
    m.def("tv_norm", [](const RArray& x) { return tv_norm(to_image(x)); }, "x"_a);

    // ---- solvers ----
    m.def("csalsa1", [](const LinearOperator& op, const CArray& y, double epsilon, const std::string& regularizer,
                        double mu, int max_iterations, int tv_iterations, bool warm_start, bool stop_on_convergence) {
        const Regularizer reg = regularizer == "tv" ? Regularizer::isotropic_tv(TvSettings{tv_iterations, 0.248, false})
                                                    : Regularizer::l1();
        const CVec obs = to_cvec(y);
        py::gil_scoped_release release;
        return csalsa1_solve(op, obs, reg, solver_config(mu, epsilon, max_iterations, warm_start, stop_on_convergence));
    }, "op"_a, "y"_a, "epsilon"_a, "regularizer"_a = "tv", "mu"_a = 1.0, "max_iterations"_a = 500,
       "tv_iterations"_a = 5, "warm_start"_a = false, "stop_on_convergence"_a = true,
       "C-SALSA-1: u-split with H1 = I. Returns a dict.");
    m.def("csalsa2", [](const LinearOperator& op, const Frame& frame, const CArray& y, double epsilon, double mu,
                        int max_iterations, bool warm_start, bool stop_on_convergence) {
        return csalsa2_solve(op, frame, to_cvec(y), Regularizer::l1(),
                             solver_config(mu, epsilon, max_iterations, warm_start, stop_on_convergence));
    }, "op"_a, "frame"_a, "y"_a, "epsilon"_a, "mu"_a = 1.0, "max_iterations"_a = 500, "warm_start"_a = false,
       "stop_on_convergence"_a = true, "C-SALSA-2: l1 analysis prior with H1 = P.");

    // ---- harness ----
    m.def("epsilon_rule", &epsilon_rule, "m"_a, "sigma"_a);
    m.def("shepp_logan", [](std::size_t n) { return from_image(shepp_logan(n)); }, "n"_a);
    m.def("cartoon_image", [](std::size_t n) { return from_image(cartoon_image(n)); }, "n"_a);
    m.def("random_squares", [](std::size_t n, double db, int count, std::uint64_t seed) {
        return from_image(random_squares(n, db, count, seed));
    }, "n"_a, "dynamic_range_db"_a = 40.0, "count"_a = 15, "seed"_a = 1);
    m.def("radial_mask", [](std::size_t n, std::size_t lines) { return from_mask(radial_mask(n, lines)); }, "n"_a,
          "lines"_a);
    m.def("blur_kernel", [](const std::string& kind, int support, double variance) {
        if (kind == "uniform") return from_image(make_blur_kernel(BlurKernelSpec::uniform(support)));
        if (kind == "gaussian") return from_image(make_blur_kernel(BlurKernelSpec::gaussian(support, variance)));
        if (kind == "inverse-quadratic") return from_image(make_blur_kernel(BlurKernelSpec::inverse_quadratic(support)));
        throw DomainError("unknown kernel '" + kind + "'");
    }, "kind"_a, "support"_a = 9, "variance"_a = 1.0);
    m.def("experiment_names", &experiment_names);

    m.def("run_experiment", [](const std::string& experiment, const py::kwargs& settings) {
        ExperimentConfig cfg = default_experiment(experiment);
        for (const auto& [k, v] : settings) apply_setting(cfg, py::str(k).cast<std::string>(), setting_text(v));
        const PreparedExperiment p = prepare_experiment(cfg);
        ExperimentReport r;
        {
            py::gil_scoped_release release;
            r = run_experiment(p.instance, p.choice, p.solver);
        }
        return py::dict("name"_a = r.name, "status"_a = to_string(r.status), "iterations"_a = r.iterations,
                        "mse"_a = r.final_mse, "constraint_norm"_a = r.final_constraint_norm, "epsilon"_a = r.epsilon,
                        "mu"_a = r.config.mu, "estimate"_a = from_image(r.estimate), "truth"_a = from_image(p.instance.truth),
                        "calls"_a = py::dict("forward"_a = r.calls.forward, "adjoint"_a = r.calls.adjoint,
                                             "inverse"_a = r.calls.inverse),
                        "history"_a = history_dict(r.history));
    }, "experiment"_a, "Runs a named experiment; keyword arguments use the config file keys.");

    m.def("validate", []() {
        std::vector<PropertyResult> results;
        {
            py::gil_scoped_release release;
            results = run_property_suite();
        }
        py::list out;
        for (const PropertyResult& r : results) out.append(py::make_tuple(r.name, r.passed, r.detail));
        return out;
    }, "Runs the property suite; returns (name, passed, detail) tuples.");

    py::class_<SolveResult>(m, "SolveResult")
        .def_readonly("iterations", &SolveResult::iterations)
        .def_property_readonly("status", [](const SolveResult& r) { return to_string(r.status); })
        .def_property_readonly("image", [](const SolveResult& r) { return from_cvec(r.image); })
        .def_property_readonly("solution", [](const SolveResult& r) { return from_cvec(r.solution); })
        .def_property_readonly("history", [](const SolveResult& r) { return history_dict(r.history); })
        .def("as_dict", &result_dict);
}
