#include "pqcv/checker.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "pqcv/oracle.hpp"

namespace pqcv {

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Equivalent: return "Equivalent";
    case Verdict::EquivalentUpToGlobalPhase: return "EquivalentUpToGlobalPhase";
    case Verdict::NotEquivalent: return "NotEquivalent";
  }
  return "?";
}

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::Construct: return "construct";
    case Strategy::Alternate: return "alternate";
    case Strategy::Auto: return "auto";
  }
  return "?";
}

Verdict verdict_from_string(std::string_view s) {
  for (auto v : {Verdict::Equivalent, Verdict::EquivalentUpToGlobalPhase, Verdict::NotEquivalent}) {
    if (s == to_string(v)) return v;
  }
  throw std::invalid_argument("unknown verdict '" + std::string(s) + "'");
}

Strategy strategy_from_string(std::string_view s) {
  for (auto v : {Strategy::Construct, Strategy::Alternate, Strategy::Auto}) {
    if (s == to_string(v)) return v;
  }
  throw std::invalid_argument("unknown strategy '" + std::string(s) + "'");
}

namespace {

using Clock = std::chrono::steady_clock;

class Job {
 public:
  Job(int n, const CheckConfig& cfg)
      : n_(n),
        cfg_(cfg),
        start_(Clock::now()),
        tr_(std::make_shared<TrddManager>(TrddManager::Options{cfg.mul_via_poly, kEpsilon})),
        dd_(*tr_, IndexOrder::for_circuit(n), StddManager::Options{cfg.scalar_extraction}) {
    dd_.set_interrupt([this] { check_time(); });
    tr_->set_interrupt([this] { check_time(); });
  }

  StddManager& dd() { return dd_; }
  TrddManager& tr() { return *tr_; }

  void check_time() const {
    if (elapsed() > cfg_.timeout_s) throw Timeout(cfg_.timeout_s);
  }
  [[nodiscard]] double elapsed() const {
    return std::chrono::duration<double>(Clock::now() - start_).count();
  }

  void observe(const STDD& d) { stats_.node_max = std::max(stats_.node_max, dd_.node_count(d)); }

  STDD left(const STDD& d, const Gate& g) {
    check_time();
    const STDD r = apply_left(dd_, d, g);
    ++consumed_;
    observe(r);
    return r;
  }

  STDD right(const STDD& d, const Gate& h) {
    check_time();
    const STDD r = apply_right(dd_, d, h);
    ++consumed_;
    observe(r);
    return r;
  }

  /// Fills the phase fields from w and classifies an identity-shaped result.
  Verdict classify_phase(CheckReport& rep, const TrRef& w) {
    rep.phase = w;
    rep.phase_is_constant = w.is_constant();
    const TrRef mod = tr_->mul(w, tr_->conj(w));
    rep.phase_modulus_one = mod.is_constant() && std::abs(mod.weight - Complex(1.0)) <= kEpsilon;
    if (rep.phase_is_constant && std::abs(w.weight - Complex(1.0)) <= kEpsilon) return Verdict::Equivalent;
    return rep.phase_modulus_one ? Verdict::EquivalentUpToGlobalPhase : Verdict::NotEquivalent;
  }

  void finish(CheckReport& rep, const STDD& final_dd, std::size_t total) {
    rep.weights = tr_;
    stats_.node_final = dd_.node_count(final_dd);
    stats_.node_max = std::max(stats_.node_max, stats_.node_final);
    stats_.nodes_tdd_total = dd_.nodes_created();
    stats_.nodes_trdd_total = tr_->nodes_created();
    rep.stats = stats_;
    rep.gates_consumed = consumed_;
    rep.gates_total = total;
    rep.wall_time = elapsed();
  }

  [[nodiscard]] int n() const { return n_; }

 private:
  int n_;
  CheckConfig cfg_;
  Clock::time_point start_;
  std::shared_ptr<TrddManager> tr_;
  StddManager dd_;
  StddStats stats_;
  std::size_t consumed_ = 0;
};

PQC prepare(const PQC& c1, const PQC& c2) {
  if (c1.n_qubits != c2.n_qubits) throw std::invalid_argument("qubit counts differ");
  return align_params(c2, c1.params);
}

}  // namespace

CheckReport check_construct(const PQC& c1, const PQC& c2_in, const CheckConfig& cfg) {
  const PQC c2 = prepare(c1, c2_in);
  Job job(c1.n_qubits, cfg);
  CheckReport rep;
  rep.strategy = Strategy::Construct;
  std::size_t total = c1.gates.size() + c2.gates.size();

  const STDD id = job.dd().identity(job.n());
  job.observe(id);
  STDD u1 = id;
  for (const auto& g : c1.gates) u1 = job.left(u1, g);
  STDD u2 = id;
  for (const auto& g : c2.gates) u2 = job.left(u2, g);

  auto& tr = job.tr();
  switch (job.dd().equal(u1, u2)) {
    case StddEquality::Identical:
      rep.verdict = job.classify_phase(rep, tr.one());
      break;
    case StddEquality::SameStructureDifferentWeight: {
      const TrRef m1 = tr.mul(u1.weight, tr.conj(u1.weight));
      const TrRef m2 = tr.mul(u2.weight, tr.conj(u2.weight));
      if (tr.add(m1, tr.scale(m2, -1.0)).is_zero()) {
        rep.verdict = Verdict::EquivalentUpToGlobalPhase;
        if (u2.weight.is_constant()) {
          job.classify_phase(rep, tr.scale(u1.weight, 1.0 / u2.weight.weight));
        } else {
          rep.phase = u1.weight;
          rep.phase_is_constant = false;
          rep.phase_modulus_one = false;
        }
      } else {
        rep.verdict = Verdict::NotEquivalent;
        rep.phase = tr.one();
      }
      break;
    }
    case StddEquality::Different: {
      // a parameter-dependent phase changes the node weights, so compare U1 V^dagger with the identity
      STDD d = u1;
      for (const auto& g : c2.gates) d = job.right(d, g);
      total += c2.gates.size();
      if (d.root == id.root) {
        rep.verdict = job.classify_phase(rep, d.weight);
      } else {
        rep.verdict = Verdict::NotEquivalent;
        rep.phase = tr.one();
      }
      job.finish(rep, d, total);
      return rep;
    }
  }
  job.finish(rep, u1, total);
  return rep;
}

CheckReport check_alternate(const PQC& c1, const PQC& c2_in, const CheckConfig& cfg) {
  const PQC c2 = prepare(c1, c2_in);
  Job job(c1.n_qubits, cfg);
  CheckReport rep;
  rep.strategy = Strategy::Alternate;
  const std::size_t n1 = c1.gates.size();
  const std::size_t n2 = c2.gates.size();
  const std::size_t total = n1 + n2;

  const STDD id = job.dd().identity(job.n());
  job.observe(id);
  STDD d = id;
  std::size_t i1 = 0;
  std::size_t i2 = 0;

  // consume [i1, e1) of c1 and [i2, e2) of c2, favouring the side with more work left
  auto run = [&](std::size_t e1, std::size_t e2) {
    const double len1 = static_cast<double>(e1 - i1);
    const double len2 = static_cast<double>(e2 - i2);
    while (i1 < e1 || i2 < e2) {
      const double r1 = len1 > 0 ? static_cast<double>(e1 - i1) / len1 : 0.0;
      const double r2 = len2 > 0 ? static_cast<double>(e2 - i2) / len2 : 0.0;
      if (i1 < e1 && r1 >= r2) {
        d = job.left(d, c1.gates[i1++]);
      } else {
        d = job.right(d, c2.gates[i2++]);
      }
    }
  };

  if (pair_compatible(c1, c2)) {
    std::vector<std::size_t> p1;
    std::vector<std::size_t> p2;
    for (std::size_t k = 0; k < n1; ++k) {
      if (c1.gates[k].is_parameterised()) p1.push_back(k);
    }
    for (std::size_t k = 0; k < n2; ++k) {
      if (c2.gates[k].is_parameterised()) p2.push_back(k);
    }
    for (std::size_t k = 0; k < p1.size(); ++k) {
      run(p1[k], p2[k]);
      d = job.left(d, c1.gates[i1++]);
      d = job.right(d, c2.gates[i2++]);
      const ParamId theta = c1.gates[p1[k]].angle->coeffs.begin()->first;
      if ((i1 < n1 || i2 < n2) && job.dd().depends_on(d, theta, true)) {
        rep.verdict = Verdict::NotEquivalent;
        rep.aborted_at_param = c1.params.name(theta);
        rep.phase = job.tr().one();
        job.finish(rep, d, total);
        return rep;
      }
    }
  }
  run(n1, n2);

  if (d.root == id.root) {
    rep.verdict = job.classify_phase(rep, d.weight);
  } else {
    rep.verdict = Verdict::NotEquivalent;
    rep.phase = job.tr().one();
  }
  job.finish(rep, d, total);
  return rep;
}

CheckReport check(const PQC& c1, const PQC& c2, const CheckConfig& cfg) {
  switch (cfg.strategy) {
    case Strategy::Construct: return check_construct(c1, c2, cfg);
    case Strategy::Alternate: return check_alternate(c1, c2, cfg);
    case Strategy::Auto: break;
  }
  const PQC a2 = prepare(c1, c2);
  return pair_compatible(c1, a2) ? check_alternate(c1, a2, cfg) : check_construct(c1, a2, cfg);
}

bool confirm_by_sampling(const PQC& c1, const PQC& c2_in, int k, std::uint64_t seed) {
  if (k < 1) throw std::invalid_argument("confirm_by_sampling needs k >= 1");
  const PQC c2 = prepare(c1, c2_in);
  Rng rng(seed);
  constexpr int kFullUnitaryQubits = 6;
  constexpr double kTol = 1e-8;
  for (int s = 0; s < k; ++s) {
    const auto angles = random_angles(rng, c1.params.size());
    if (c1.n_qubits <= kFullUnitaryQubits) {
      const auto u1 = simulate(c1, angles);
      const auto u2 = simulate(c2, angles);
      if (!equal_up_to_phase(u1.data, u2.data, kTol)) return false;
      continue;
    }
    const std::size_t dim = std::size_t{1} << c1.n_qubits;
    std::vector<Complex> out1;
    std::vector<Complex> out2;
    for (int probe = 0; probe < 2; ++probe) {
      std::vector<Complex> psi(dim);
      double norm = 0.0;
      for (auto& x : psi) {
        x = Complex(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
        norm += std::norm(x);
      }
      for (auto& x : psi) x /= std::sqrt(norm);
      const auto a = simulate_state(c1, angles, psi);
      const auto b = simulate_state(c2, angles, psi);
      out1.insert(out1.end(), a.begin(), a.end());
      out2.insert(out2.end(), b.begin(), b.end());
    }
    // one shared phase across both probes
    if (!equal_up_to_phase(out1, out2, kTol)) return false;
  }
  return true;
}

}  // namespace pqcv
