#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "kgds/approx.hpp"
#include "kgds/arith.hpp"
#include "kgds/counting.hpp"
#include "kgds/error.hpp"
#include "kgds/experiment.hpp"
#include "kgds/limsup.hpp"
#include "kgds/partition.hpp"
#include "kgds/report.hpp"

namespace py = pybind11;
using namespace kgds;

namespace {

py::object fraction(const Rational& r) {
  static py::object cls = py::module_::import("fractions").attr("Fraction");
  return cls(to_string(r));
}

Partition partition_of(int m, int n, const std::string& spec) {
  const Dims dims(m, n);
  return spec.empty() ? Partition::trivial(dims) : parse_partition(dims, spec);
}

SetKind set_of(const std::string& name) {
  if (name == "A") return SetKind::kA;
  if (name == "A_pi") return SetKind::kApi;
  if (name == "A_prime") return SetKind::kAprime;
  throw ValidationError("unknown set '" + name + "'");
}

py::dict bound_dict(const BoundReport& rep) {
  py::dict d;
  d["lemma"] = rep.lemma;
  py::list rows;
  for (const auto& r : rep.values) rows.append(py::make_tuple(r.q, fraction(r.exact), fraction(r.comparator), r.ratio));
  d["rows"] = rows;
  d["threshold"] = rep.threshold ? py::cast(*rep.threshold) : py::none();
  d["fitted_constant"] = rep.fitted_constant ? py::cast(*rep.fitted_constant) : py::none();
  d["truncated"] = rep.truncated;
  d["note"] = rep.note;
  return d;
}

}  // namespace

PYBIND11_MODULE(_kgds, mod) {
  mod.doc() = "Exact counting sums, limsup-set measures and dichotomy experiments";

  py::register_exception<ValidationError>(mod, "ValidationError", PyExc_ValueError);
  py::register_exception<ResourceLimitError>(mod, "ResourceLimitError", PyExc_RuntimeError);
  py::register_exception<IoError>(mod, "IoError", PyExc_OSError);

  mod.def("phi", [](std::uint64_t n) { return shared_sieve(n)->phi(n); });
  mod.def("mu", [](std::uint64_t n) { return shared_sieve(n)->mu(n); });
  mod.def("count_primitive_ball", &count_primitive_ball, py::arg("dim"), py::arg("q"));
  mod.def("count_coprime_shell", &count_coprime_shell, py::arg("dim"), py::arg("q"));
  mod.def(
      "sum_phi_gcd_ball",
      [](int dim, std::int64_t q, bool coprime_to_q) {
        return fraction(sum_phi_gcd_ball(dim, q, coprime_to_q ? GcdMode::kCoprimeToQ : GcdMode::kPlain));
      },
      py::arg("dim"), py::arg("q"), py::arg("coprime_to_q") = false);
  mod.def(
      "dirichlet_identity",
      [](std::int64_t q) {
        const auto c = dirichlet_identity_check(q);
        return py::make_tuple(fraction(c.lhs), fraction(c.rhs));
      },
      py::arg("q"));
  mod.def(
      "count_coprime_interval",
      [](std::int64_t q, const std::string& alpha, const std::string& beta) {
        return count_coprime_interval(q, parse_frac(alpha), parse_frac(beta));
      },
      py::arg("q"), py::arg("alpha"), py::arg("beta"));

  mod.def(
      "canonical_partition", [](int m, int n, const std::string& spec) { return partition_of(m, n, spec).to_string(); },
      py::arg("m"), py::arg("n"), py::arg("spec") = "");
  mod.def(
      "has_ell", [](int m, int n, const std::string& spec) { return has_ell(partition_of(m, n, spec)); },
      py::arg("m"), py::arg("n"), py::arg("spec") = "");
  mod.def(
      "funny_sum",
      [](int m, int n, const std::string& spec, std::int64_t q) { return fraction(funny_sum(partition_of(m, n, spec), q)); },
      py::arg("m"), py::arg("n"), py::arg("spec"), py::arg("q"));
  mod.def(
      "counting_sum",
      [](int m, int n, const std::string& spec, std::int64_t q, const std::vector<std::string>& alpha,
         const std::vector<std::string>& beta) {
        std::vector<Frac> a, b;
        for (const auto& s : alpha) a.push_back(parse_frac(s));
        for (const auto& s : beta) b.push_back(parse_frac(s));
        return counting_sum(partition_of(m, n, spec), q, Box(a, b, q));
      },
      py::arg("m"), py::arg("n"), py::arg("spec"), py::arg("q"), py::arg("alpha"), py::arg("beta"));
  mod.def(
      "funny_report",
      [](int m, int n, const std::string& spec, std::int64_t q_max) {
        return bound_dict(funny_report(partition_of(m, n, spec), q_max));
      },
      py::arg("m"), py::arg("n"), py::arg("spec"), py::arg("q_max"));

  mod.def(
      "in_set",
      [](const std::string& set, const std::vector<double>& x, int n, int m, const std::vector<std::int64_t>& q,
         const std::vector<double>& center, double radius, const std::string& spec) {
        const auto pi = partition_of(m, n, spec);
        return in_set(set_of(set), &pi, PointMatrix(n, m, x), q, TargetBall(center, radius));
      },
      py::arg("set"), py::arg("x"), py::arg("n"), py::arg("m"), py::arg("q"), py::arg("center"), py::arg("radius"),
      py::arg("partition") = "");
  mod.def(
      "measure",
      [](const std::string& set, int m, int n, const std::vector<std::int64_t>& q, const std::vector<double>& center,
         double radius, std::uint64_t samples, std::uint64_t seed, const std::string& spec, unsigned threads) {
        const auto pi = partition_of(m, n, spec);
        const auto e = mc_measure(set_of(set), &pi, q, TargetBall(center, radius), OpenSetU::full(n * m), samples,
                                  seed, threads);
        return py::make_tuple(e.mean, e.std_error);
      },
      py::arg("set"), py::arg("m"), py::arg("n"), py::arg("q"), py::arg("center"), py::arg("radius"),
      py::arg("samples") = 100000, py::arg("seed") = 1, py::arg("partition") = "", py::arg("threads") = 1);
  mod.def(
      "measure_A_exact",
      [](const std::vector<std::int64_t>& q, const std::vector<double>& center, double radius) {
        return measure_A_exact(q, TargetBall(center, radius));
      },
      py::arg("q"), py::arg("center"), py::arg("radius"));

  mod.def(
      "series",
      [](const std::string& psi, int m, int n, std::int64_t q_max) {
        const auto rep = series_report(parse_psi(psi, Dims(m, n)), q_max);
        py::dict d;
        d["Q"] = rep.Q;
        d["S_kg"] = rep.S_kg;
        d["S_ds"] = rep.S_ds;
        d["verdict_kg"] = verdict_name(rep.verdict_kg);
        d["verdict_ds"] = verdict_name(rep.verdict_ds);
        return d;
      },
      py::arg("psi"), py::arg("m"), py::arg("n"), py::arg("q_max"));
  mod.def(
      "run",
      [](const std::string& psi, int m, int n, const std::string& mode, const std::string& spec, std::int64_t q_max,
         std::uint64_t x_samples, std::uint64_t seed, unsigned threads) {
        DichotomyConfig c;
        c.dims = Dims(m, n);
        c.mode = mode == "plain" ? CountMode::kPlain
                                 : (mode == "partition" ? CountMode::kPartition : CountMode::kCoprime);
        if (mode != "plain" && mode != "partition" && mode != "coprime-per-coordinate")
          throw ValidationError("unknown mode '" + mode + "'");
        if (c.mode == CountMode::kPartition) c.partition = partition_of(m, n, spec);
        c.psi = parse_psi(psi, c.dims);
        c.q_max = q_max;
        c.x_samples = x_samples;
        c.seed = seed;
        const auto r = run_dichotomy(c, unlimited_budget(), threads);
        py::dict d;
        d["schedule"] = r.config.schedule;
        d["y"] = *r.config.y;
        d["hits_plain"] = r.hits_plain;
        d["hits_constrained"] = r.hits_constrained;
        py::list summary;
        for (const auto& w : r.summary) summary.append(py::make_tuple(w.Q, w.frac_x_with_new_hits, w.median_hits));
        d["summary"] = summary;
        d["in_hypothesis"] = r.in_hypothesis;
        return d;
      },
      py::arg("psi"), py::arg("m"), py::arg("n"), py::arg("mode") = "plain", py::arg("partition") = "",
      py::arg("q_max") = 100, py::arg("x_samples") = 100, py::arg("seed") = 0, py::arg("threads") = 1);
}
