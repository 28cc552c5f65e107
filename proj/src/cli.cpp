#include "gkz/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <regex>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "gkz/errors.hpp"
#include "gkz/gkz_system.hpp"
#include "gkz/mellin_barnes.hpp"

namespace gkz::cli {

using nlohmann::json;

InputError::InputError(std::string field, const std::string& message, std::optional<std::size_t> line)
    : std::runtime_error((line ? "line " + std::to_string(*line) + ": " : std::string()) +
                         (field.empty() ? std::string() : "field '" + field + "': ") + message),
      field_(std::move(field)),
      line_(line) {}

namespace {

constexpr long kVeryGenericBound = 24;
constexpr long kPartitionBound = 12;
constexpr long kMaxBoxOrder = 6;

// ---------------------------------------------------------------------------
// Parsing

std::string at(const std::string& base, const std::string& key) { return base + "/" + key; }
std::string at(const std::string& base, std::size_t i) { return base + "/" + std::to_string(i); }

const json& require(const json& obj, const std::string& key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) throw InputError(at(path, key), "required field is missing");
  return *it;
}

void check_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw InputError(path, "expected an object");
  for (const auto& [key, _] : obj.items())
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
      throw InputError(at(path, key), "unknown field");
}

const json& require_array(const json& v, const std::string& path, std::optional<std::size_t> size = std::nullopt) {
  if (!v.is_array()) throw InputError(path, "expected an array");
  if (size && v.size() != *size)
    throw InputError(path, "expected " + std::to_string(*size) + " entries, found " + std::to_string(v.size()));
  return v;
}

long long parse_int(const json& v, const std::string& path) {
  if (!v.is_number_integer()) throw InputError(path, "expected an integer");
  return v.get<long long>();
}

double parse_real(const json& v, const std::string& path) {
  if (!v.is_number()) throw InputError(path, "expected a number");
  return v.get<double>();
}

std::optional<Rational> parse_rational_text(const std::string& s) {
  static const std::regex re(R"(\s*([+-]?\d+)\s*(?:/\s*(\d+)\s*)?)");
  std::smatch m;
  if (!std::regex_match(s, m, re)) return std::nullopt;
  const BigInt p(m[1].str()[0] == '+' ? m[1].str().substr(1) : m[1].str());
  const BigInt q = m[2].matched ? BigInt(m[2].str()) : BigInt(1);
  if (q == 0) return std::nullopt;
  return Rational(p, q);
}

Rational parse_rational(const json& v, const std::string& path) {
  if (v.is_number_integer()) return Rational(v.get<long long>());
  if (!v.is_string()) throw InputError(path, "expected a rational string \"p/q\"");
  auto q = parse_rational_text(v.get<std::string>());
  if (!q) throw InputError(path, "malformed rational \"" + v.get<std::string>() + "\"");
  return *q;
}

cplx parse_complex(const json& v, const std::string& path) {
  check_keys(v, path, {"re", "im"});
  return {parse_real(require(v, "re", path), at(path, "re")), parse_real(require(v, "im", path), at(path, "im"))};
}

json int_json(const BigInt& x) {
  if (x >= std::numeric_limits<long long>::min() && x <= std::numeric_limits<long long>::max())
    return static_cast<long long>(x);
  return x.str();
}

json vector_json(const IntVector& v) {
  json out = json::array();
  for (const auto& x : v) out.push_back(int_json(x));
  return out;
}

json indices_json(std::span<const std::size_t> idx) {
  json out = json::array();
  for (auto i : idx) out.push_back(i + 1);
  return out;
}

json complex_array(std::span<const cplx> v) {
  json out = json::array();
  for (auto x : v) out.push_back(to_json(x));
  return out;
}

// ---------------------------------------------------------------------------
// Commands

struct Context {
  const ProblemFile& problem;
  const CommandOptions& options;
  std::ostream& out;
  std::ostream& err;
};

GkzSystem system_of(const ProblemFile& p) { return build_system(p.A, p.c, p.c_exact); }

const std::vector<cplx>& require_z(const ProblemFile& p) {
  if (!p.z) throw InputError("/z", "this command needs z");
  return *p.z;
}

Simplex require_sigma(const ProblemFile& p) {
  if (!p.sigma) throw InputError("/sigma", "this command needs sigma");
  return make_simplex(p.A, *p.sigma);
}

json very_generic_json(const VeryGenericReport& r) {
  json j{{"verdict", std::string(to_string(r.verdict))}};
  if (r.verdict == Verdict::No) {
    j["witness"] = r.witness;
    j["witness_entry"] = r.witness_entry + 1;
  }
  if (r.verdict == Verdict::Unknown) j["scan_bound"] = r.bound;
  if (r.base_point_non_integral) j["base_point_non_integral"] = *r.base_point_non_integral;
  return j;
}

json admissibility_json(const AdmissibilityReport& a) {
  json s = json::array();
  for (const auto& q : a.s) s.push_back(format_rational(q));
  return {{"admissible", a.admissible}, {"columns", indices_json(a.columns)}, {"s", s}};
}

json simplex_json(const GkzSystem& sys, const Simplex& sg) {
  json j;
  j["sigma"] = indices_json(sg.indices);
  j["det"] = int_json(sg.det);
  j["r"] = sg.order();
  json diag = json::array();
  for (const auto& d : smith_normal_form(sg.a_sigma).diagonal()) diag.push_back(int_json(d));
  j["snf_diagonal"] = diag;
  json kt = json::array();
  const QuotientGroup rows(sg.a_sigma.transpose());
  for (const auto& v : rows.representatives()) kt.push_back(vector_json(v));
  j["k_tilde_representatives"] = kt;
  json kb = json::array();
  for (const auto& v : sigmabar_representatives(sys.A, sg.indices, 64)) kb.push_back(vector_json(v));
  j["sigmabar_representatives"] = kb;
  j["admissibility"] = admissibility_json(simplex_admissible(sys.A, sg.indices));
  j["very_generic"] = very_generic_json(is_very_generic(sys, sg, kVeryGenericBound));
  return j;
}

int cmd_analyze(Context& ctx) {
  const GkzSystem sys = system_of(ctx.problem);
  json j;
  j["command"] = "analyze";
  j["problem"] = echo(ctx.problem);
  json kernel = json::array();
  for (const auto& u : sys.kernel) kernel.push_back(vector_json(u));
  j["lattice"] = {{"n", sys.n()}, {"N", sys.N()}, {"saturated", true}, {"kernel_basis", kernel}};
  j["volume"] = int_json(newton_volume(sys.A));

  json nr;
  try {
    const NonresonanceReport r = is_nonresonant(sys);
    nr = {{"verdict", std::string(to_string(r.verdict))}};
    if (r.verdict == Verdict::No) {
      nr["face_columns"] = indices_json(r.face_columns);
      nr["face_normal"] = vector_json(r.face_normal);
    }
    if (!r.note.empty()) nr["note"] = r.note;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DimensionTooLarge) throw;
    nr = {{"verdict", "Unknown"}, {"note", e.what()}};
  }
  j["nonresonant"] = nr;

  json simplices = json::array();
  if (ctx.problem.sigma) {
    j["mode"] = "requested";
    simplices.push_back(simplex_json(sys, make_simplex(sys.A, *ctx.problem.sigma)));
  } else {
    j["mode"] = "all_simplices";
    for (const auto& sg : all_simplices(sys.A)) simplices.push_back(simplex_json(sys, sg));
  }
  j["simplices"] = simplices;
  ctx.out << j.dump(2) << "\n";
  ctx.err << "analyze: volume " << j["volume"].dump() << ", " << simplices.size() << " simplex(es) reported\n";
  return kPass;
}

int cmd_series(Context& ctx) {
  const GkzSystem sys = system_of(ctx.problem);
  const Simplex sg = require_sigma(ctx.problem);
  const auto& z = require_z(ctx.problem);
  const GammaSeriesBasis basis(sys, sg, ctx.problem.truncation);
  const auto vals = basis.evaluate(z);
  json rows = json::array();
  cplx sum = 0.0;
  for (std::size_t k = 0; k < vals.size(); ++k) {
    const SeriesValue& v = vals[k];
    sum += v.value;
    rows.push_back({{"k", basis.representatives()[k]},
                    {"value", to_json(v.value)},
                    {"tail_bound", v.tail_bound},
                    {"tail_reliable", v.tail_reliable},
                    {"terms_used", v.terms_used},
                    {"last_order", v.last_order},
                    {"max_term", v.max_term},
                    {"branch_log", complex_array(v.branch_log)}});
  }
  json j{{"command", "series"}, {"problem", echo(ctx.problem)}, {"sigma", indices_json(sg.indices)},
         {"r", vals.size()}, {"values", rows}, {"sum", to_json(sum)}};
  ctx.out << j.dump(2) << "\n";
  double worst = 0.0;
  for (const auto& v : vals) worst = std::max(worst, v.tail_bound);
  ctx.err << "series: " << vals.size() << " classes, largest tail bound " << worst << "\n";
  return kPass;
}

std::vector<std::vector<long>> k_tilde_list(const ProblemFile& p, const Simplex& sg, bool all) {
  std::vector<std::vector<long>> out;
  if (all) {
    const QuotientGroup rows(sg.a_sigma.transpose());
    for (const auto& v : rows.representatives()) {
      std::vector<long> k;
      for (const auto& x : v) k.push_back(static_cast<long>(to_ll(x)));
      out.push_back(std::move(k));
    }
  } else {
    out.push_back(p.k_tilde ? *p.k_tilde : std::vector<long>(p.A.rows(), 0));
  }
  return out;
}

json domain_json(const DomainReport& d) {
  json s = json::array(), lhs = json::array(), rhs = json::array();
  for (std::size_t k = 0; k < d.columns.size(); ++k) {
    s.push_back(format_rational(d.s[k]));
    lhs.push_back(d.lhs[k]);
    rhs.push_back(d.automatic[k] ? json(nullptr) : json(d.rhs[k]));
  }
  return {{"inside", d.inside}, {"warning", !d.inside}, {"columns", indices_json(d.columns)}, {"s", s},
          {"automatic", d.automatic}, {"abs_z", lhs}, {"bound", rhs}};
}

int cmd_mb(Context& ctx) {
  const GkzSystem sys = system_of(ctx.problem);
  const Simplex sg = require_sigma(ctx.problem);
  const auto& z = require_z(ctx.problem);
  const MbIntegral integral(sys, sg, ctx.problem.quadrature, ctx.problem.truncation.tail_tol);
  const auto kts = k_tilde_list(ctx.problem, sg, ctx.options.all_ktilde);
  const DomainReport dom = in_convergence_domain(sg, sys.A, z);
  if (!dom.inside) ctx.err << "mb: warning: z lies outside the convergence domain; computing anyway\n";
  const std::vector<std::vector<int>> alphas{std::vector<int>(sys.N(), 0)};
  const auto vals = integral.evaluate(z, kts, alphas);
  json rows = json::array();
  for (std::size_t t = 0; t < vals.size(); ++t) {
    const MbValue& v = vals[t];
    rows.push_back({{"k_tilde", kts[t]},
                    {"value", to_json(v.value)},
                    {"nodes_used", v.nodes_used},
                    {"self_difference", v.self_difference ? json(*v.self_difference) : json(nullptr)},
                    {"error_estimate", v.error_estimate},
                    {"branch_log", complex_array(v.branch_log)}});
  }
  json j{{"command", "mb"}, {"problem", echo(ctx.problem)}, {"sigma", indices_json(sg.indices)},
         {"domain", domain_json(dom)}, {"values", rows}};
  ctx.out << j.dump(2) << "\n";
  ctx.err << "mb: " << vals.size() << " value(s), " << (vals.empty() ? 0 : vals[0].nodes_used) << " nodes each\n";
  return kPass;
}

json residual_json(const ResidualReport& r) {
  return {{"operator", r.op},        {"evaluator", r.evaluator},     {"function", r.function},
          {"point", complex_array(r.point)}, {"residual", r.residual}, {"scale", r.scale},
          {"normalized", r.normalized()}, {"threshold", r.threshold}, {"verdict", r.pass ? "pass" : "fail"}};
}

json thresholds_json(const Thresholds& t) {
  return {{"identity", t.identity},
          {"truncation", t.truncation},
          {"pde", t.pde},
          {"recovered_matrix", t.recovered_matrix},
          {"condition_limit", t.condition_limit}};
}

long order_of(const IntVector& u) {
  const auto [plus, minus] = split_kernel_vector(u);
  long p = 0, m = 0;
  for (long x : plus) p += x;
  for (long x : minus) m += x;
  return std::max(p, m);
}

int cmd_verify(Context& ctx) {
  const ProblemFile& p = ctx.problem;
  const GkzSystem sys = system_of(p);
  const Simplex sg = require_sigma(p);
  const auto& z = require_z(p);
  const Thresholds& thr = p.thresholds;

  json j{{"command", "verify"}, {"problem", echo(p)}, {"thresholds", thresholds_json(thr)}};
  json checks = json::array();
  json failing = json::array();
  bool all_pass = true;
  auto record = [&](json check) {
    if (!check["pass"].get<bool>()) {
      all_pass = false;
      failing.push_back(check);
    }
    checks.push_back(std::move(check));
  };
  auto finish = [&](const std::string& status) {
    j["checks"] = checks;
    j["failing"] = failing;
    j["status"] = status;
    j["pass"] = all_pass;
    ctx.out << j.dump(2) << "\n";
    ctx.err << "verify: " << checks.size() << " check group(s), " << failing.size() << " failing";
    if (status != "complete") ctx.err << " (" << status << ")";
    ctx.err << "\n";
    return all_pass ? kPass : kCheckFailed;
  };

  const VeryGenericReport vg = is_very_generic(sys, sg, kVeryGenericBound);
  record({{"name", "very_generic"}, {"pass", vg.verdict == Verdict::Yes}, {"report", very_generic_json(vg)}});
  if (!all_pass) return finish("short-circuited: c is not very generic for sigma");

  const AdmissibilityReport adm = simplex_admissible(sys.A, sg.indices);
  record({{"name", "admissible"}, {"pass", adm.admissible}, {"report", admissibility_json(adm)}});
  if (!all_pass) return finish("short-circuited: sigma is not admissible");

  const DomainReport dom = in_convergence_domain(sg, sys.A, z);
  record({{"name", "convergence_domain"}, {"pass", dom.inside}, {"report", domain_json(dom)}});
  if (!all_pass) return finish("short-circuited: z lies outside the convergence domain");

  auto basis = std::make_shared<const GammaSeriesBasis>(sys, sg, p.truncation);
  {
    const PartitionReport pr = partition_check(sys, sg, basis->representatives(), kPartitionBound);
    json rep{{"bound", pr.bound}, {"checked", pr.checked}, {"hits", pr.hits}};
    if (pr.counterexample) {
      rep["counterexample"] = *pr.counterexample;
      rep["matching_classes"] = pr.matching;
    }
    record({{"name", "partition"}, {"pass", pr.pass}, {"report", rep}});
  }

  std::vector<IntVector> boxes;
  json skipped = json::array();
  for (const auto& u : sys.kernel) {
    if (order_of(u) <= kMaxBoxOrder)
      boxes.push_back(u);
    else
      skipped.push_back(vector_json(u));
  }
  const auto kts = k_tilde_list(p, sg, false);
  const SeriesEvaluator series(basis);
  const MbEvaluator mb(std::make_shared<const MbIntegral>(sys, sg, p.quadrature, p.truncation.tail_tol), kts,
                       MbOptions{false, Exec::Parallel});
  for (const SolutionEvaluator* f : {static_cast<const SolutionEvaluator*>(&series),
                                     static_cast<const SolutionEvaluator*>(&mb)}) {
    const auto reports = pde_residuals(*f, sys, boxes, z, thr);
    json rs = json::array();
    bool ok = true;
    for (const auto& r : reports) {
      rs.push_back(residual_json(r));
      ok = ok && r.pass;
    }
    record({{"name", "residuals_" + f->label()}, {"pass", ok}, {"reports", rs}, {"skipped_box_vectors", skipped}});
  }

  BasisRelationOptions bro;
  bro.truncation = p.truncation;
  bro.contour = p.quadrature;
  bro.tail_tol = p.truncation.tail_tol;
  {
    const BasisRelationReport br = basis_relation_check(sys, sg, z, thr, bro);
    json rep{{"max_rel_err", br.max_rel_err}, {"row_errors", br.row_errors}, {"r", br.matrix_used.r},
             {"k_tilde_representatives", br.k_tilde_reps}, {"sigmabar_representatives", br.k_reps}};
    if (br.condition_number) rep["condition_number"] = *br.condition_number;
    if (br.recovered_max_err) rep["recovered_max_err"] = *br.recovered_max_err;
    if (br.recovered_modulus_err) rep["recovered_modulus_err"] = *br.recovered_modulus_err;
    record({{"name", "basis_relation"}, {"pass", br.pass}, {"report", rep}});
  }

  if (ctx.options.self_test) {
    json st = json::array();
    bool ok = true;
    for (const auto& r : run_self_tests(sys, sg, z, thr, bro)) {
      st.push_back({{"name", r.name}, {"detected", r.detected}, {"applicable", r.applicable}, {"detail", r.detail}});
      ok = ok && (r.detected || !r.applicable);
    }
    record({{"name", "self_test"}, {"pass", ok}, {"injected", st}});
  }
  return finish("complete");
}

int cmd_triangulate(Context& ctx) {
  const ProblemFile& p = ctx.problem;
  if (!p.weights) throw InputError("/weights", "triangulate needs weights");
  const GkzSystem sys = system_of(p);
  const Triangulation tri = regular_triangulation(sys.A, *p.weights);
  const BigInt vol = newton_volume(sys.A);
  json cells = json::array();
  BigInt count = 0;
  for (const auto& sg : tri.simplices) {
    const AdmissibilityReport adm = simplex_admissible(sys.A, sg.indices);
    count += sg.order();
    cells.push_back({{"sigma", indices_json(sg.indices)},
                     {"abs_det", sg.order()},
                     {"r", sg.order()},
                     {"admissibility", admissibility_json(adm)}});
  }
  const bool match = count == vol;
  json j{{"command", "triangulate"},   {"problem", echo(p)},        {"simplices", cells},
         {"solution_count", int_json(count)}, {"volume", int_json(vol)}, {"count_matches_volume", match}};
  ctx.out << j.dump(2) << "\n";
  ctx.err << "triangulate: " << tri.simplices.size() << " simplex(es), " << count << " solutions, volume " << vol
          << "\n";
  return match ? kPass : kCheckFailed;
}

void emit_error(std::ostream& out, std::ostream& err, const std::string& code, const std::string& message,
                const std::string& field = {}) {
  json j{{"error", code}, {"message", message}};
  if (!field.empty()) j["field"] = field;
  out << j.dump(2) << "\n";
  err << "error: " << message << "\n";
}

}  // namespace

// ---------------------------------------------------------------------------

nlohmann::json to_json(cplx v) { return {{"re", v.real()}, {"im", v.imag()}}; }

std::string format_rational(const Rational& q) {
  if (boost::multiprecision::denominator(q) == 1) return boost::multiprecision::numerator(q).str();
  return boost::multiprecision::numerator(q).str() + "/" + boost::multiprecision::denominator(q).str();
}

ProblemFile parse_problem(const json& j) {
  check_keys(j, "", {"A", "c", "z", "sigma", "k_tilde", "truncation", "quadrature", "weights", "thresholds"});
  ProblemFile p;

  const json& a = require_array(require(j, "A", ""), "/A");
  if (a.empty()) throw InputError("/A", "A must have at least one row");
  const std::size_t n = a.size();
  const std::size_t N = require_array(a[0], "/A/0").size();
  p.A = IntMatrix(n, N);
  for (std::size_t i = 0; i < n; ++i) {
    const json& row = require_array(a[i], at("/A", i), N);
    for (std::size_t k = 0; k < N; ++k) p.A(i, k) = BigInt(parse_int(row[k], at(at("/A", i), k)));
  }

  const json& c = require_array(require(j, "c", ""), "/c", n);
  RatVector exact;
  for (std::size_t i = 0; i < n; ++i) {
    const std::string path = at("/c", i);
    if (c[i].is_object()) {
      p.c.push_back(parse_complex(c[i], path));
    } else {
      const Rational q = parse_rational(c[i], path);
      exact.push_back(q);
      p.c.emplace_back(to_double(q), 0.0);
    }
  }
  if (exact.size() == n) p.c_exact = exact;

  if (auto it = j.find("z"); it != j.end()) {
    const json& z = require_array(*it, "/z", N);
    std::vector<cplx> zs;
    for (std::size_t k = 0; k < N; ++k) zs.push_back(parse_complex(z[k], at("/z", k)));
    p.z = zs;
  }

  if (auto it = j.find("sigma"); it != j.end()) {
    const json& s = require_array(*it, "/sigma", n);
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < n; ++i) {
      const long long v = parse_int(s[i], at("/sigma", i));
      if (v < 1 || v > static_cast<long long>(N))
        throw InputError(at("/sigma", i), "column index must lie in 1.." + std::to_string(N));
      idx.push_back(static_cast<std::size_t>(v - 1));
    }
    std::sort(idx.begin(), idx.end());
    if (std::adjacent_find(idx.begin(), idx.end()) != idx.end())
      throw InputError("/sigma", "column indices must be distinct");
    p.sigma = idx;
  }

  if (auto it = j.find("k_tilde"); it != j.end()) {
    const json& k = require_array(*it, "/k_tilde", n);
    std::vector<long> kt;
    for (std::size_t i = 0; i < n; ++i) kt.push_back(static_cast<long>(parse_int(k[i], at("/k_tilde", i))));
    p.k_tilde = kt;
  }

  if (auto it = j.find("truncation"); it != j.end()) {
    check_keys(*it, "/truncation", {"max_order", "tail_tol"});
    if (it->contains("max_order")) {
      p.truncation.max_order = static_cast<long>(parse_int((*it)["max_order"], "/truncation/max_order"));
      if (p.truncation.max_order < 0) throw InputError("/truncation/max_order", "must be >= 0");
    }
    if (it->contains("tail_tol")) {
      p.truncation.tail_tol = parse_real((*it)["tail_tol"], "/truncation/tail_tol");
      if (!(p.truncation.tail_tol > 0.0)) throw InputError("/truncation/tail_tol", "must be positive");
    }
  }

  if (auto it = j.find("quadrature"); it != j.end()) {
    const std::string base = "/quadrature";
    check_keys(*it, base, {"epsilon", "epsilon_prime", "arm_length", "panels_per_unit", "nodes_per_panel"});
    ContourSpec& q = p.quadrature;
    if (it->contains("epsilon")) q.epsilon = parse_real((*it)["epsilon"], at(base, "epsilon"));
    if (it->contains("epsilon_prime")) q.epsilon_prime = parse_real((*it)["epsilon_prime"], at(base, "epsilon_prime"));
    if (it->contains("arm_length")) q.arm_length = parse_real((*it)["arm_length"], at(base, "arm_length"));
    if (it->contains("panels_per_unit"))
      q.panels_per_unit = static_cast<int>(parse_int((*it)["panels_per_unit"], at(base, "panels_per_unit")));
    if (it->contains("nodes_per_panel"))
      q.nodes_per_panel = static_cast<int>(parse_int((*it)["nodes_per_panel"], at(base, "nodes_per_panel")));
    try {
      q.validate();
    } catch (const Error& e) {
      throw InputError(base, e.what());
    }
  }

  if (auto it = j.find("weights"); it != j.end()) {
    const json& w = require_array(*it, "/weights", N);
    RatVector ws;
    for (std::size_t k = 0; k < N; ++k) ws.push_back(parse_rational(w[k], at("/weights", k)));
    p.weights = ws;
  }

  if (auto it = j.find("thresholds"); it != j.end()) {
    const std::string base = "/thresholds";
    check_keys(*it, base, {"identity", "truncation", "pde", "recovered_matrix", "condition_limit"});
    Thresholds& t = p.thresholds;
    for (auto [key, slot] : {std::pair<const char*, double*>{"identity", &t.identity},
                             {"truncation", &t.truncation},
                             {"pde", &t.pde},
                             {"recovered_matrix", &t.recovered_matrix},
                             {"condition_limit", &t.condition_limit}})
      if (it->contains(key)) {
        *slot = parse_real((*it)[key], at(base, key));
        if (!(*slot > 0.0)) throw InputError(at(base, key), "must be positive");
      }
  }
  return p;
}

ProblemFile parse_problem_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t byte = std::min<std::size_t>(e.byte, text.size());
    const std::size_t line = 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<long>(byte > 0 ? byte - 1 : 0), '\n'));
    throw InputError("", std::string("malformed JSON: ") + e.what(), line);
  }
  return parse_problem(j);
}

ProblemFile load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("", "cannot open problem file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_problem_text(ss.str());
}

nlohmann::json echo(const ProblemFile& p) {
  json j;
  json a = json::array();
  for (std::size_t i = 0; i < p.A.rows(); ++i) a.push_back(vector_json(p.A.row(i)));
  j["A"] = a;
  json c = json::array();
  for (std::size_t i = 0; i < p.c.size(); ++i)
    c.push_back(p.c_exact ? json(format_rational((*p.c_exact)[i])) : to_json(p.c[i]));
  j["c"] = c;
  if (p.z) j["z"] = complex_array(*p.z);
  if (p.sigma) j["sigma"] = indices_json(*p.sigma);
  j["k_tilde"] = p.k_tilde ? *p.k_tilde : std::vector<long>(p.A.rows(), 0);
  j["truncation"] = {{"max_order", p.truncation.max_order}, {"tail_tol", p.truncation.tail_tol}};
  j["quadrature"] = {{"epsilon", p.quadrature.epsilon},
                     {"epsilon_prime", p.quadrature.epsilon_prime},
                     {"arm_length", p.quadrature.arm_length},
                     {"panels_per_unit", p.quadrature.panels_per_unit},
                     {"nodes_per_panel", p.quadrature.nodes_per_panel}};
  if (p.weights) {
    json w = json::array();
    for (const auto& x : *p.weights) w.push_back(format_rational(x));
    j["weights"] = w;
  }
  j["thresholds"] = thresholds_json(p.thresholds);
  return j;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument:
    case ErrorCode::RankDeficient:
    case ErrorCode::LatticeNotSaturated:
    case ErrorCode::SingularModulus:
    case ErrorCode::SingularSimplex:
    case ErrorCode::IncompleteRepresentatives:
    case ErrorCode::DimensionTooLarge:
    case ErrorCode::DegenerateWeights:
    case ErrorCode::OrderTooHigh:
      return kInvalidInput;
    default:
      return kNumericFailure;
  }
}

int run_command(const std::string& command, const ProblemFile& problem, const CommandOptions& options,
                std::ostream& out, std::ostream& err) {
  Context ctx{problem, options, out, err};
  try {
    if (command == "analyze") return cmd_analyze(ctx);
    if (command == "series") return cmd_series(ctx);
    if (command == "mb") return cmd_mb(ctx);
    if (command == "verify") return cmd_verify(ctx);
    if (command == "triangulate") return cmd_triangulate(ctx);
    emit_error(out, err, "InvalidArgument", "unknown command " + command);
    return kInvalidInput;
  } catch (const InputError& e) {
    emit_error(out, err, "InvalidInput", e.what(), e.field());
    return kInvalidInput;
  } catch (const Error& e) {
    emit_error(out, err, std::string(to_string(e.code())), e.what());
    return exit_code_for(e.code());
  }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"GKZ hypergeometric systems: Gamma-series, Mellin-Barnes integrals and their cross-checks"};
  std::string command, file;
  CommandOptions options;
  app.add_option("command", command, "analyze | series | mb | verify | triangulate")
      ->required()
      ->check(CLI::IsMember({"analyze", "series", "mb", "verify", "triangulate"}));
  app.add_option("problem-file", file, "JSON problem file")->required();
  app.add_flag("--all-ktilde", options.all_ktilde, "mb: evaluate every k~ representative");
  app.add_flag("--self-test", options.self_test, "verify: also inject known faults and require detection");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kPass;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kInvalidInput;
  }
  configure_threads_from_env();

  ProblemFile problem;
  try {
    problem = load_problem(file);
  } catch (const InputError& e) {
    emit_error(out, err, "InvalidInput", e.what(), e.field());
    return kInvalidInput;
  }
  return run_command(command, problem, options, out, err);
}

}  // namespace gkz::cli
