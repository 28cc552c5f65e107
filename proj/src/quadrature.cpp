#include "gkz/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include <omp.h>

#include "gkz/errors.hpp"

namespace gkz {

namespace {

constexpr int kQuietPanelsToCut = 3;

struct Accumulator {
  std::vector<KahanSum<cplx>> sum;
  std::vector<double> mass;
  std::vector<double> running_max;
  long evaluations = 0;
  bool arm_exhausted = false;

  explicit Accumulator(std::size_t n) : sum(n), mass(n, 0.0), running_max(n, 0.0) {}
};

// Values of every node of one panel: n_nodes x n_out, plus per-node mass.
struct PanelValues {
  std::vector<cplx> vals;
  std::vector<double> mass;
  long evaluations = 0;
  bool arm_exhausted = false;
};

class Nested {
 public:
  Nested(std::span<const ContourRule> rules, std::size_t n_out, const TensorIntegrand& f, double tail_tol)
      : rules_(rules), n_out_(n_out), f_(f), tail_tol_(tail_tol) {}

  QuadratureResult run(Exec exec) const {
    std::vector<const QuadNode*> stack(rules_.size(), nullptr);
    Accumulator acc(n_out_);
    if (exec == Exec::Parallel && max_threads() > 1)
      integrate_top_parallel(acc);
    else
      integrate(0, stack, acc);
    return finish(acc);
  }

 private:
  QuadratureResult finish(const Accumulator& acc) const {
    QuadratureResult r;
    r.values.resize(n_out_);
    for (std::size_t o = 0; o < n_out_; ++o) r.values[o] = acc.sum[o].value();
    r.mass = acc.mass;
    r.evaluations = acc.evaluations;
    r.arm_exhausted = acc.arm_exhausted;
    return r;
  }

  void panel_values(std::size_t d, const Panel& panel, std::vector<const QuadNode*>& stack, PanelValues& pv) const {
    const std::size_t k = panel.nodes.size();
    pv.vals.assign(k * n_out_, 0.0);
    pv.mass.assign(k * n_out_, 0.0);
    pv.evaluations = 0;
    pv.arm_exhausted = false;
    for (std::size_t q = 0; q < k; ++q) {
      stack[d] = &panel.nodes[q];
      std::span<cplx> out(pv.vals.data() + q * n_out_, n_out_);
      if (d + 1 == rules_.size()) {
        f_(stack, out);
        for (std::size_t o = 0; o < n_out_; ++o) pv.mass[q * n_out_ + o] = std::abs(out[o]);
        ++pv.evaluations;
      } else {
        Accumulator inner(n_out_);
        integrate(d + 1, stack, inner);
        for (std::size_t o = 0; o < n_out_; ++o) {
          out[o] = inner.sum[o].value();
          pv.mass[q * n_out_ + o] = inner.mass[o];
        }
        pv.evaluations += inner.evaluations;
        pv.arm_exhausted = pv.arm_exhausted || inner.arm_exhausted;
      }
    }
  }

  // Adds a panel; returns true when the panel was quiet for every output.
  bool accumulate(const Panel& panel, const PanelValues& pv, Accumulator& acc) const {
    std::vector<double> panel_max(n_out_, 0.0);
    for (std::size_t q = 0; q < panel.nodes.size(); ++q) {
      const cplx w = panel.nodes[q].w;
      const double aw = std::abs(w);
      for (std::size_t o = 0; o < n_out_; ++o) {
        const cplx c = w * pv.vals[q * n_out_ + o];
        acc.sum[o].add(c);
        acc.mass[o] += aw * pv.mass[q * n_out_ + o];
        const double m = std::abs(c);
        panel_max[o] = std::max(panel_max[o], m);
        acc.running_max[o] = std::max(acc.running_max[o], m);
      }
    }
    acc.evaluations += pv.evaluations;
    acc.arm_exhausted = acc.arm_exhausted || pv.arm_exhausted;
    for (std::size_t o = 0; o < n_out_; ++o)
      if (panel_max[o] > tail_tol_ * acc.running_max[o]) return false;
    return true;
  }

  void integrate(std::size_t d, std::vector<const QuadNode*>& stack, Accumulator& acc) const {
    const ContourRule& rule = rules_[d];
    PanelValues pv;
    for (const auto& panel : rule.core) {
      panel_values(d, panel, stack, pv);
      accumulate(panel, pv, acc);
    }
    for (const auto& arm : rule.arms) {
      int quiet = 0;
      for (const auto& panel : arm) {
        panel_values(d, panel, stack, pv);
        quiet = accumulate(panel, pv, acc) ? quiet + 1 : 0;
        if (quiet >= kQuietPanelsToCut) break;
      }
      // The arm ran to arm_length with its last panel still contributing.
      if (!arm.empty() && quiet == 0) acc.arm_exhausted = true;
    }
  }

  // Outer dimension: panels are evaluated speculatively in parallel chunks,
  // then consumed in serial order; panels past a cut are discarded.
  void integrate_top_parallel(Accumulator& acc) const {
    const ContourRule& rule = rules_[0];
    const std::size_t chunk = static_cast<std::size_t>(std::max(4, max_threads()));

    auto eval_range = [&](const std::vector<Panel>& panels, std::size_t begin, std::size_t end,
                          std::vector<PanelValues>& out) {
      out.resize(end - begin);
      const long count = static_cast<long>(end - begin);
#pragma omp parallel
      {
        std::vector<const QuadNode*> stack(rules_.size(), nullptr);
#pragma omp for schedule(dynamic, 1)
        for (long i = 0; i < count; ++i) panel_values(0, panels[begin + static_cast<std::size_t>(i)], stack, out[static_cast<std::size_t>(i)]);
      }
    };

    std::vector<PanelValues> buf;
    eval_range(rule.core, 0, rule.core.size(), buf);
    for (std::size_t p = 0; p < rule.core.size(); ++p) accumulate(rule.core[p], buf[p], acc);

    for (const auto& arm : rule.arms) {
      int quiet = 0;
      bool cut = false;
      for (std::size_t begin = 0; begin < arm.size() && !cut; begin += chunk) {
        const std::size_t end = std::min(arm.size(), begin + chunk);
        eval_range(arm, begin, end, buf);
        for (std::size_t p = begin; p < end; ++p) {
          quiet = accumulate(arm[p], buf[p - begin], acc) ? quiet + 1 : 0;
          if (quiet >= kQuietPanelsToCut) {
            cut = true;
            break;
          }
        }
      }
      if (!arm.empty() && quiet == 0) acc.arm_exhausted = true;
    }
  }

  std::span<const ContourRule> rules_;
  std::size_t n_out_;
  const TensorIntegrand& f_;
  double tail_tol_;
};

}  // namespace

QuadratureResult tensor_quadrature(std::span<const ContourRule> rules, std::size_t n_out, const TensorIntegrand& f,
                                   double tail_tol, Exec exec) {
  if (rules.empty()) throw Error(ErrorCode::InvalidArgument, "need at least one integration dimension");
  if (!(tail_tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tail_tol must be positive");
  return Nested(rules, n_out, f, tail_tol).run(exec);
}

}  // namespace gkz
