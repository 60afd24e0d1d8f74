#include "fsdp/representation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fsdp/errors.hpp"

namespace fsdp {

std::size_t Representation::dimension() const {
  std::size_t l = 0;
  for (std::size_t d : dims) l = std::max(l, d);
  return l;
}

double Representation::evaluate_from(int s, const std::vector<Vec>& inputs, const std::vector<Vec>& states) const {
  if (s < horizon.t0 || s >= horizon.T) throw InvalidArgument("tail start stage outside the horizon");
  if (inputs.size() != static_cast<std::size_t>(horizon.T - s) || states.size() != inputs.size() + 1) {
    throw InvalidArgument("trajectory length does not match the representation horizon");
  }
  Vec w, out;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    int t = s + static_cast<int>(i);
    out.assign(dim_at(t), 0.0);
    stage(t, states[i], inputs[i], w, out);
    w.swap(out);
  }
  return terminal(states.back(), w);
}

double Representation::evaluate(const std::vector<Vec>& inputs, const std::vector<Vec>& states) const {
  return evaluate_from(horizon.t0, inputs, states);
}

namespace {

void check_horizon(const Horizon& h) {
  if (h.T <= h.t0) throw InvalidArgument("representation horizon must have T > t0");
}

template <typename T>
void check_count(const std::vector<T>& v, std::size_t expected, const char* what) {
  if (v.size() != expected) {
    throw InvalidArgument(std::string("expected ") + std::to_string(expected) + " " + what + ", got " +
                          std::to_string(v.size()));
  }
}

}  // namespace

Representation additive_representation(const Horizon& h, const AdditiveCosts& costs) {
  check_horizon(h);
  check_count(costs.stage_costs, h.stages(), "stage costs");
  if (!costs.terminal_cost) throw InvalidArgument("terminal cost is not set");
  auto src = std::make_shared<const AdditiveCosts>(costs);
  Representation r;
  r.horizon = h;
  r.dims.assign(h.stages(), 1);
  r.stage = [src, t0 = h.t0](int t, ConstVec x, ConstVec u, ConstVec w, MutVec out) {
    const auto& c = src->stage_costs[static_cast<std::size_t>(t - t0)];
    double v = c ? c(x, u) : 0.0;
    out[0] = w.empty() ? v : v + w[0];
  };
  r.terminal = [src](ConstVec x, ConstVec w) { return src->terminal_cost(x) + w[0]; };
  r.name = "additive";
  r.additive_source = src;
  return r;
}

Representation max_representation(const Horizon& h, std::vector<StageCost> stage_terms, TerminalCost terminal_term) {
  check_horizon(h);
  check_count(stage_terms, h.stages(), "stage terms");
  bool any = static_cast<bool>(terminal_term) || std::any_of(stage_terms.begin(), stage_terms.end(),
                                                             [](const StageCost& c) { return bool(c); });
  if (!any) throw InvalidArgument("max representation needs at least one term");
  auto terms = std::make_shared<const std::vector<StageCost>>(std::move(stage_terms));
  constexpr double kNone = -std::numeric_limits<double>::infinity();
  Representation r;
  r.horizon = h;
  r.dims.assign(h.stages(), 1);
  r.stage = [terms, t0 = h.t0](int t, ConstVec x, ConstVec u, ConstVec w, MutVec out) {
    const auto& d = (*terms)[static_cast<std::size_t>(t - t0)];
    double v = d ? d(x, u) : kNone;
    out[0] = w.empty() ? v : std::max(v, w[0]);
  };
  r.terminal = [terminal_term](ConstVec x, ConstVec w) {
    double v = terminal_term ? terminal_term(x) : kNone;
    return std::max(v, w[0]);
  };
  r.name = "max";
  return r;
}

Representation variance_representation(const Horizon& h, std::vector<TerminalCost> terms) {
  check_horizon(h);
  check_count(terms, h.stages() + 1, "variance terms");
  auto a = std::make_shared<const std::vector<TerminalCost>>(std::move(terms));
  const double factor = 1.0 / static_cast<double>(h.T - h.t0);
  Representation r;
  r.horizon = h;
  r.dims.assign(h.stages(), 2);
  r.stage = [a, t0 = h.t0](int t, ConstVec x, ConstVec, ConstVec w, MutVec out) {
    double v = (*a)[static_cast<std::size_t>(t - t0)](x);
    if (w.empty()) {
      out[0] = v * v;
      out[1] = v;
    } else {
      out[0] = w[0] + v * v;
      out[1] = w[1] + v;
    }
  };
  r.terminal = [a, factor](ConstVec x, ConstVec w) {
    double v = a->back()(x);
    double s = w[1] + v;
    return (w[0] + v * v) - factor * s * s;
  };
  r.name = "variance";
  return r;
}

Representation pnorm_representation(const Horizon& h, std::vector<std::vector<StageCost>> terms,
                                    std::vector<double> exponents) {
  check_horizon(h);
  if (terms.empty()) throw InvalidArgument("p-norm representation needs at least one term");
  check_count(exponents, terms.size(), "exponents");
  for (double p : exponents) {
    if (!(p > 0.0)) throw InvalidArgument("p-norm exponents must be positive");
  }
  for (const auto& row : terms) check_count(row, h.stages(), "p-norm stage terms");
  auto c = std::make_shared<const std::vector<std::vector<StageCost>>>(std::move(terms));
  auto p = std::make_shared<const Vec>(std::move(exponents));
  Representation r;
  r.horizon = h;
  r.dims.assign(h.stages(), c->size());
  r.stage = [c, p, t0 = h.t0](int t, ConstVec x, ConstVec u, ConstVec w, MutVec out) {
    for (std::size_t j = 0; j < c->size(); ++j) {
      double v = (*c)[j][static_cast<std::size_t>(t - t0)](x, u);
      if (v < 0.0) throw NegativeTermError(j, t, v);
      double powered = std::pow(v, (*p)[j]);
      out[j] = w.empty() ? powered : w[j] + powered;
    }
  };
  r.terminal = [p](ConstVec, ConstVec w) {
    double acc = 0.0;
    for (std::size_t j = 0; j < p->size(); ++j) acc += std::pow(w[j], 1.0 / (*p)[j]);
    return acc;
  };
  r.name = "pnorm";
  return r;
}

Representation count_representation(const Horizon& h, std::function<bool(ConstVec x, ConstVec u)> in_set,
                                    std::function<bool(ConstVec x)> terminal_in_set) {
  check_horizon(h);
  if (!in_set) throw InvalidArgument("count representation needs a membership predicate");
  Representation r;
  r.horizon = h;
  r.dims.assign(h.stages(), 1);
  r.stage = [in_set](int, ConstVec x, ConstVec u, ConstVec w, MutVec out) {
    double v = in_set(x, u) ? 1.0 : 0.0;
    out[0] = w.empty() ? v : w[0] + v;
  };
  r.terminal = [terminal_in_set](ConstVec x, ConstVec w) {
    return w[0] + ((terminal_in_set && terminal_in_set(x)) ? 1.0 : 0.0);
  };
  r.name = "count";
  return r;
}

Representation constant_representation(const Horizon& h, double value) {
  check_horizon(h);
  Representation r;
  r.horizon = h;
  r.dims.assign(h.stages(), 0);
  r.stage = [](int, ConstVec, ConstVec, ConstVec, MutVec) {};
  r.terminal = [value](ConstVec, ConstVec) { return value; };
  r.name = "constant";
  return r;
}

namespace {

Representation stack(const Representation& r1, const Representation& r2,
                     std::function<double(double, double)> combine, const char* name) {
  if (!(r1.horizon == r2.horizon)) throw HorizonMismatch("composed representations have different horizons");
  auto a = std::make_shared<const Representation>(r1);
  auto b = std::make_shared<const Representation>(r2);
  Representation r;
  r.horizon = r1.horizon;
  r.dims.resize(r1.dims.size());
  for (std::size_t i = 0; i < r.dims.size(); ++i) r.dims[i] = r1.dims[i] + r2.dims[i];
  r.stage = [a, b](int t, ConstVec x, ConstVec u, ConstVec w, MutVec out) {
    std::size_t d1 = a->dim_at(t);
    ConstVec w1, w2;
    if (!w.empty()) {
      std::size_t d1_prev = a->dim_at(t - 1);
      w1 = w.first(d1_prev);
      w2 = w.subspan(d1_prev);
    }
    a->stage(t, x, u, w1, out.first(d1));
    b->stage(t, x, u, w2, out.subspan(d1));
  };
  r.terminal = [a, b, combine](ConstVec x, ConstVec w) {
    std::size_t d1 = a->dims.back();
    return combine(a->terminal(x, w.first(d1)), b->terminal(x, w.subspan(d1)));
  };
  r.name = std::string(name) + "(" + r1.name + ", " + r2.name + ")";
  return r;
}

}  // namespace

Representation compose_sum(const Representation& r1, const Representation& r2) {
  Representation r = stack(r1, r2, [](double a, double b) { return a + b; }, "sum");
  r.sum_lhs = std::make_shared<const Representation>(r1);
  r.sum_rhs = std::make_shared<const Representation>(r2);
  return r;
}

Representation compose_product(const Representation& r1, const Representation& r2) {
  return stack(r1, r2, [](double a, double b) { return a * b; }, "product");
}

Representation compose_unary(const Representation& r, std::function<double(double)> U) {
  if (!U) throw InvalidArgument("unary composition needs a function");
  Representation out = r;
  out.additive_source.reset();
  out.sum_lhs.reset();
  out.sum_rhs.reset();
  out.terminal = [inner = r.terminal, U](ConstVec x, ConstVec w) { return U(inner(x, w)); };
  out.name = "unary(" + r.name + ")";
  return out;
}

Representation naive_representation(const Horizon& h, TrajectoryFunctional J) {
  check_horizon(h);
  if (!J) throw InvalidArgument("naive representation needs a functional");
  const std::size_t n = h.n, m = h.m;
  Representation r;
  r.horizon = h;
  r.dims.resize(h.stages());
  for (std::size_t i = 0; i < r.dims.size(); ++i) r.dims[i] = (i + 1) * (n + m);
  r.stage = [n, m, t0 = h.t0](int t, ConstVec x, ConstVec u, ConstVec w, MutVec out) {
    std::size_t k = static_cast<std::size_t>(t - t0);
    if (w.size() != k * (n + m)) {
      throw InvalidArgument("naive representation only supports evaluation from the first stage");
    }
    auto it = std::copy(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(n * k), out.begin());
    it = std::copy(x.begin(), x.end(), it);
    it = std::copy(w.begin() + static_cast<std::ptrdiff_t>(n * k), w.end(), it);
    std::copy(u.begin(), u.end(), it);
  };
  r.terminal = [n, m, K = h.stages(), J](ConstVec x, ConstVec w) {
    std::vector<Vec> states(K + 1), inputs(K);
    for (std::size_t i = 0; i < K; ++i) {
      states[i].assign(w.begin() + static_cast<std::ptrdiff_t>(i * n),
                       w.begin() + static_cast<std::ptrdiff_t>((i + 1) * n));
      auto base = w.begin() + static_cast<std::ptrdiff_t>(K * n + i * m);
      inputs[i].assign(base, base + static_cast<std::ptrdiff_t>(m));
    }
    states[K].assign(x.begin(), x.end());
    return J(inputs, states);
  };
  r.name = "naive";
  return r;
}

}  // namespace fsdp
