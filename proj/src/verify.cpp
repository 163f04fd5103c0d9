#include "sbl/verify.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "sbl/fiber_integration.hpp"

namespace sbl {

namespace {

using json = nlohmann::json;
constexpr double kPi = std::numbers::pi;
constexpr double kBad = std::numeric_limits<double>::max();

/// Shortest text that reads back to the same double.
std::string num(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size() || !std::isfinite(d)) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("invalid number for '" + key + "': '" + v + "'");
  }
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) {
    const auto b = cur.find_first_not_of(" \t");
    const auto e = cur.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(cur.substr(b, e - b + 1));
  }
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// ---------------------------------------------------------------------------
// Record construction.

/// Accumulates the maximum residual of one identity over sample points.
class Check {
 public:
  Check(std::string id, std::string anchor, double tol) {
    r_.id = std::move(id);
    r_.anchor = std::move(anchor);
    r_.tol = tol;
  }

  template <class F>
  Check& over(const std::vector<BundlePoint>& pts, F residual) {
    for (const BundlePoint& p : pts) {
      if (failed_) break;
      sample([&] { return residual(p); });
    }
    return *this;
  }

  template <class F>
  Check& once(F residual) {
    if (!failed_) sample(residual);
    return *this;
  }

  Check& note(std::string n) {
    r_.note = std::move(n);
    return *this;
  }

  Record done() {
    r_.status = (!failed_ && r_.max_residual <= r_.tol) ? Status::Pass : Status::Fail;
    return r_;
  }

  /// Passes when the residual exceeds the tolerance (identity expected to fail).
  Record done_expect_nonzero() {
    r_.status = (!failed_ && r_.max_residual > r_.tol) ? Status::Pass : Status::Fail;
    return r_;
  }

 private:
  template <class F>
  void sample(F f) {
    try {
      const double v = f();
      ++r_.samples;
      if (!std::isfinite(v)) {
        fail("non-finite residual");
        return;
      }
      r_.max_residual = std::max(r_.max_residual, v);
    } catch (const std::exception& e) {
      fail(e.what());
    }
  }
  void fail(const std::string& why) {
    failed_ = true;
    r_.max_residual = kBad;
    r_.note = why;
  }

  Record r_;
  bool failed_ = false;
};

/// A displayed identity that fails while its derived correction holds is a
/// finding, not a failure.
void add_pair(VerificationReport& rep, Record printed, Record derived) {
  if (printed.status == Status::Fail && derived.status == Status::Pass && printed.max_residual != kBad) {
    printed.status = Status::MismatchVsPaper;
    if (printed.note.empty()) printed.note = "corrected identity " + derived.id + " holds";
  }
  rep.records.push_back(std::move(printed));
  rep.records.push_back(std::move(derived));
}

void observe(VerificationReport& rep, std::string id, double value, std::string note = "") {
  rep.observations.push_back({std::move(id), value, std::move(note)});
}

struct Env {
  const RunConfig& cfg;
  std::map<std::string, double> tol;
  ChartMetric m;
  std::vector<BundlePoint> pts;
  int dim() const { return m.dim(); }
  double t(const std::string& k) const { return tol.at(k); }
};

FormValue<double> frame_basis(int dim, std::initializer_list<int> idx) { return basis_form<double>(dim, idx); }

double form_gap(const FormField& a, const FormField& b, const ChartMetric& m, const BundlePoint& p) {
  return frame_residual(a, b, m, p.locus(m.dim()));
}

double form_size(const FormField& a, const ChartMetric& m, const BundlePoint& p) {
  return frame_norm(a, m, p.locus(m.dim()));
}

double scalar_at(const FormField& f, const ChartMetric& m, const BundlePoint& p) {
  return frame_values(f, m, p.locus(m.dim())).c[0];
}

Record form_identity(const Env& env, const std::string& id, const std::string& anchor, const std::string& tol_key,
                     const FormField& lhs, const FormField& rhs, int max_samples = -1) {
  std::vector<BundlePoint> pts = env.pts;
  if (max_samples > 0 && int(pts.size()) > max_samples) pts.resize(max_samples);
  return Check(id, anchor, env.t(tol_key))
      .over(pts, [&](const BundlePoint& p) { return form_gap(lhs, rhs, env.m, p); })
      .done();
}

Record frame_identity(const Env& env, const std::string& id, const std::string& anchor, const FormField& f,
                      const FormValue<double>& expected) {
  return Check(id, anchor, env.t("frame"))
      .over(env.pts,
            [&](const BundlePoint& p) {
              return max_abs(frame_values(f, env.m, p.locus(env.dim())) - expected);
            })
      .done();
}

bool constant_curvature(const ChartMetric& m, double* c) { return m.has_constant_curvature(c); }

// ---------------------------------------------------------------------------
// Suites.

void suite_structure(const Env& env, VerificationReport& rep) {
  const double s = env.cfg.s;
  const FundamentalSystem sys = build_system(env.m, s);
  const RhoFamily fam = rho_family(sys);
  const FormField& th = sys.theta;
  const auto& a = sys.alpha;
  const int D = 5;

  rep.records.push_back(frame_identity(env, "structure.frame.theta", "θ = ⟨ξ, B ·⟩ = s e⁰", th,
                                       s * frame_basis(D, {0})));
  rep.records.push_back(frame_identity(env, "structure.frame.alpha0", "α₀ = e^{12}", a[0], frame_basis(D, {1, 2})));
  rep.records.push_back(frame_identity(env, "structure.frame.alpha1", "α₁ = e^{14} − e^{23}", a[1],
                                       frame_basis(D, {1, 4}) - frame_basis(D, {2, 3})));
  rep.records.push_back(frame_identity(env, "structure.frame.alpha2", "α₂ = e^{34}", a[2], frame_basis(D, {3, 4})));
  rep.records.push_back(frame_identity(env, "structure.frame.dtheta", "dθ = e^{31} + e^{42}", sys.dtheta,
                                       frame_basis(D, {3, 1}) + frame_basis(D, {4, 2})));

  rep.records.push_back(form_identity(env, "structure.dtheta_bilinear",
                                      "d(s e⁰) = dθ, dθ(v,w) = ⟨v,Bw⟩ − ⟨w,Bv⟩", "structure",
                                      ext_derivative(th), sys.dtheta));
  rep.records.push_back(form_identity(env, "structure.dalpha0", "dα₀ = (1/s²) θ∧α₁", "structure",
                                      ext_derivative(a[0]), (1 / (s * s)) * wedge(th, a[1])));
  rep.records.push_back(form_identity(env, "structure.dalpha1", "dα₁ = (2/s²) θ∧α₂ − r θ∧α₀", "structure",
                                      ext_derivative(a[1]),
                                      (2 / (s * s)) * wedge(th, a[2]) - wedge(fam.r, wedge(th, a[0]))));
  rep.records.push_back(form_identity(
      env, "structure.dalpha2", "dα₂ = θ∧γ − (r/2) θ∧α₁ + s α₀∧ρ", "structure", ext_derivative(a[2]),
      wedge(th, fam.gamma) - 0.5 * wedge(fam.r, wedge(th, a[1])) + s * wedge(a[0], fam.rho)));
  for (int i = 0; i < 3; ++i) {
    const FormField rhs = ((i + 1) / (s * s)) * wedge(th, sys.alpha_at(i + 1)) + curvature_correction(sys, i);
    rep.records.push_back(form_identity(env, "structure.dalpha_general." + std::to_string(i),
                                        "dα_i = (1/s²)(i+1) θ∧α_{i+1} + 𝓡α_i, 𝓡α_i = Σ s R_{p0jq} e^{jq} ∧ "
                                        "e_{p+n}⌟α_i (i = " + std::to_string(i) + ")",
                                        "structure", ext_derivative(a[i]), rhs));
  }
  rep.records.push_back(form_identity(env, "structure.R_alpha0", "𝓡α₀ = 0", "frame", curvature_correction(sys, 0),
                                      sys.zero(3)));
  rep.records.push_back(form_identity(env, "structure.R_alpha1", "𝓡α₁ = −r θ∧α₀", "frame",
                                      curvature_correction(sys, 1), -1.0 * wedge(fam.r, wedge(th, a[0]))));
  {
    const std::vector<std::pair<int, int>> pairs = {{0, 0}, {0, 1}, {1, 2}, {2, 2}};
    rep.records.push_back(Check("structure.wedge_zero", "α_i∧α_j = 0 for j ≠ n−i", env.t("frame"))
                              .over(env.pts,
                                    [&](const BundlePoint& p) {
                                      double worst = 0;
                                      for (auto [i, j] : pairs)
                                        worst = std::max(worst, form_size(wedge(a[i], a[j]), env.m, p));
                                      return worst;
                                    })
                              .done());
  }

  double c = 0;
  if (constant_curvature(env.m, &c)) {
    rep.records.push_back(Check("structure.constant_curvature.r", "r = 2c", env.t("curvature"))
                              .over(env.pts, [&](const BundlePoint& p) {
                                return std::abs(scalar_at(fam.r, env.m, p) - 2 * c);
                              })
                              .done());
    for (int i = 0; i < 3; ++i) {
      const FormField rhs = i == 0 ? sys.zero(3) : (-c * (3 - i)) * wedge(th, sys.alpha_at(i - 1));
      rep.records.push_back(form_identity(env, "structure.constant_curvature.R_alpha" + std::to_string(i),
                                          "𝓡α_i = −c(n−i+1) θ∧α_{i−1} (i = " + std::to_string(i) + ")",
                                          "structure", curvature_correction(sys, i), rhs));
    }
  }
}

void suite_hodge(const Env& env, VerificationReport& rep) {
  const double s = env.cfg.s;
  const ChartMetric& m = env.m;
  const FundamentalSystem sys = build_system(m, s);
  const RhoFamily fam = rho_family(sys);
  const FormField& th = sys.theta;
  const auto& a = sys.alpha;
  const FormField F1 = F1_field(sys), F4 = F4_field(sys);

  auto star = [&](const FormField& f) { return hodge_star(f, m); };
  auto delta = [&](const FormField& f) { return codifferential(f, m); };
  auto add = [&](const std::string& id, const std::string& anchor, const FormField& l, const FormField& r) {
    rep.records.push_back(form_identity(env, id, anchor, "hodge", l, r));
  };

  add("hodge.star.theta", "(1/s) *θ = α₀∧α₂", (1 / s) * star(th), wedge(a[0], a[2]));
  add("hodge.star.dtheta", "*dθ = −(1/s) θ∧dθ", star(sys.dtheta), (-1 / s) * wedge(th, sys.dtheta));
  add("hodge.star.alpha0", "*α_i = ((−1)^{n−i}/s) θ∧α_{n−i}: *α₀ = (1/s) θ∧α₂", star(a[0]),
      (1 / s) * wedge(th, a[2]));
  add("hodge.star.alpha1", "*α_i = ((−1)^{n−i}/s) θ∧α_{n−i}: *α₁ = −(1/s) θ∧α₁", star(a[1]),
      (-1 / s) * wedge(th, a[1]));
  add("hodge.star.alpha2", "*α_i = ((−1)^{n−i}/s) θ∧α_{n−i}: *α₂ = (1/s) θ∧α₀", star(a[2]),
      (1 / s) * wedge(th, a[0]));

  add("hodge.delta.theta", "δθ = 0", delta(th), sys.zero(0));
  add_pair(rep, form_identity(env, "hodge.delta.dtheta", "δdθ = −(1/s²)θ", "hodge", delta(sys.dtheta),
                              (-1 / (s * s)) * th),
           form_identity(env, "hodge.delta.dtheta_derived", "δdθ = −(2/s²)θ (δ = −*d*)", "hodge",
                         delta(sys.dtheta), (-2 / (s * s)) * th));
  add("hodge.delta.alpha0", "δα₀ = −s ρ₃", delta(a[0]), -s * fam.rho3);
  add("hodge.delta.alpha1", "δα₁ = 0", delta(a[1]), sys.zero(1));
  add("hodge.delta.alpha2", "δα₂ = 0", delta(a[2]), sys.zero(1));
  add("hodge.delta.rho1", "δρ₁ = 2F₄", delta(fam.rho1), 2.0 * F4);
  add_pair(rep, form_identity(env, "hodge.delta.rho2", "δρ₂ = 2F₁", "hodge", delta(fam.rho2), 2.0 * F1),
           form_identity(env, "hodge.delta.rho2_derived", "δρ₂ = −2F₁ (δ = −*d*)", "hodge", delta(fam.rho2),
                         -2.0 * F1));
  add("hodge.delta.rho3", "δρ₃ = 0", delta(fam.rho3), sys.zero(0));

  double c = 0;
  const bool einstein = constant_curvature(m, &c);
  {
    Check chk("hodge.einstein", "Einstein if and only if δα_{n−2} = 0 (n = 2: δα₀)", env.t("hodge"));
    chk.over(env.pts, [&](const BundlePoint& p) { return form_size(delta(a[0]), m, p); });
    if (einstein) {
      rep.records.push_back(chk.note("Einstein metric: δα₀ must vanish").done());
    } else {
      rep.records.push_back(chk.note("non-Einstein metric: δα₀ must be nonzero somewhere").done_expect_nonzero());
    }
  }
  if (einstein) {
    auto lap = [&](const FormField& f) { return laplacian(f, m); };
    const double s2 = s * s;
    rep.records.push_back(form_identity(env, "hodge.laplacian.alpha0", "Δα₀ = (2/s²)α₀ − 2c α₂", "laplacian",
                                        lap(a[0]), (2 / s2) * a[0] - (2 * c) * a[2]));
    rep.records.push_back(form_identity(env, "hodge.laplacian.alpha1", "Δα₁ = ((2 + 2c²s⁴)/s²) α₁", "laplacian",
                                        lap(a[1]), ((2 + 2 * c * c * s2 * s2) / s2) * a[1]));
    rep.records.push_back(form_identity(env, "hodge.laplacian.alpha2", "Δα₂ = −2c α₀ + 2c²s² α₂", "laplacian",
                                        lap(a[2]), (-2 * c) * a[0] + (2 * c * c * s2) * a[2]));
    rep.records.push_back(form_identity(env, "hodge.laplacian.dtheta_derived", "Δdθ = −(2/s²) dθ (δ = −*d*)",
                                        "laplacian", lap(sys.dtheta), (-2 / s2) * sys.dtheta));
  }

  double worst = 0;
  for (const BundlePoint& p : env.pts) worst = std::max(worst, form_size(delta(fam.rho), m, p));
  observe(rep, "hodge.delta_rho", worst, "max |δρ| over samples; no identity asserted");
}

void suite_rho(const Env& env, VerificationReport& rep) {
  const double s = env.cfg.s;
  const ChartMetric& m = env.m;
  const FundamentalSystem sys = build_system(m, s);
  const RhoFamily f = rho_family(sys);
  const FormField& th = sys.theta;
  const auto& a = sys.alpha;
  const FormField& dth = sys.dtheta;
  auto add = [&](const std::string& id, const std::string& anchor, const FormField& l, const FormField& r) {
    rep.records.push_back(form_identity(env, id, anchor, "rho", l, r));
  };
  auto chain = [&](const std::string& id, const std::string& anchor, const FormField& x, const FormField& y,
                   const FormField& z) {
    rep.records.push_back(Check(id, anchor, env.t("rho"))
                              .over(env.pts,
                                    [&](const BundlePoint& p) {
                                      return std::max(form_gap(x, y, m, p), form_gap(x, z, m, p));
                                    })
                              .done());
  };

  add("rho.direct", "ρ = Σ R_{a0ab} e^{b+n} = (1/s) ξ⌟(lifted Ricci)", f.rho, f.rho_direct);
  chain("rho.chain.1", "ρ∧α₀ = −ρ₁∧α₁ = −ρ₂∧dθ", wedge(f.rho, a[0]), -1.0 * wedge(f.rho1, a[1]),
        -1.0 * wedge(f.rho2, dth));
  chain("rho.chain.2", "ρ₁∧α₂ = ρ₃∧dθ = −ρ∧α₁", wedge(f.rho1, a[2]), wedge(f.rho3, dth), -1.0 * wedge(f.rho, a[1]));
  chain("rho.chain.3", "ρ₂∧α₁ = −ρ₃∧α₀ = −ρ₁∧dθ", wedge(f.rho2, a[1]), -1.0 * wedge(f.rho3, a[0]),
        -1.0 * wedge(f.rho1, dth));
  chain("rho.chain.4", "ρ₃∧α₁ = ρ∧dθ = −ρ₂∧α₂", wedge(f.rho3, a[1]), wedge(f.rho, dth), -1.0 * wedge(f.rho2, a[2]));

  const FormField volM = (1 / s) * wedge(th, a[0]);
  add("rho.star.rho_vol", "*(ρ∧vol_M) = ρ₃", hodge_star(wedge(f.rho, volM), m), f.rho3);
  add("rho.star.rho3_vol", "*(ρ₃∧vol_M) = −ρ", hodge_star(wedge(f.rho3, volM), m), -1.0 * f.rho);
  add("rho.star.rho1", "*ρ₁ = (1/s) θ∧ρ₂∧α₂", hodge_star(f.rho1, m), (1 / s) * wedge(th, wedge(f.rho2, a[2])));
  add("rho.star.rho2", "*ρ₂ = −(1/s) θ∧ρ₁∧α₂", hodge_star(f.rho2, m), (-1 / s) * wedge(th, wedge(f.rho1, a[2])));

  add("rho.p2", "ρ₃∧ρ = p²α₂", wedge(f.rho3, f.rho), wedge(f.p2, a[2]));
  add("rho.p2_alpha0", "ρ₂∧ρ₁ = p²α₀", wedge(f.rho2, f.rho1), wedge(f.p2, a[0]));
  add("rho.q2", "q² α₀∧α₂ = γ∧γ", wedge(f.q2, wedge(a[0], a[2])), wedge(f.gamma, f.gamma));
  rep.records.push_back(Check("rho.q2_det", "q² = ‖γ‖² = ½r² − 2 det R_{·00·}", env.t("rho"))
                            .over(env.pts,
                                  [&](const BundlePoint& p) {
                                    const ScalarInvariants v = scalar_invariants(sys, p);
                                    return std::abs(v.q2 - v.q2_det);
                                  })
                            .done());
  rep.records.push_back(Check("rho.r_scal", "r = R_{1010} + R_{2020} = ½scal − c", env.t("curvature"))
                            .over(env.pts,
                                  [&](const BundlePoint& p) {
                                    const ScalarInvariants v = scalar_invariants(sys, p);
                                    return std::abs(v.r + v.c - 0.5 * v.scal);
                                  })
                            .done());
  rep.records.push_back(Check("rho.nonnegative", "p² = ‖ρ‖² ≥ 0, q² ≥ 0", env.t("curvature"))
                            .over(env.pts,
                                  [&](const BundlePoint& p) {
                                    const ScalarInvariants v = scalar_invariants(sys, p);
                                    return std::max({0.0, -v.p2, -v.q2});
                                  })
                            .done());
  {
    const FormField lhs = wedge(th, wedge(f.rho, wedge(f.rho1, wedge(f.rho2, f.rho3))));
    const FormField p4 = wedge(f.p2, f.p2);
    rep.records.push_back(Check("rho.p4vol", "s p⁴ vol_𝒮 = θ∧ρ∧ρ₁∧ρ₂∧ρ₃", env.t("rho"))
                              .over(env.pts,
                                    [&](const BundlePoint& p) {
                                      const double pp = scalar_at(p4, m, p);
                                      return form_gap(lhs, (s * pp) * sys.vol(), m, p);
                                    })
                              .done());
  }
  add("rho.dr", "dr = Σ(∇ᵢRic)₀₀ eⁱ + (2/s)ρ", ext_derivative(f.r), dr_formula(sys));
  const FormField drho = ext_derivative(f.rho);
  add_pair(rep,
           form_identity(env, "rho.drho", "dρ = (1/s) Σ eⁱ ∧ ξ⌟∇*ᵢRic", "rho", drho, drho_formula(sys)),
           form_identity(env, "rho.drho_derived",
                         "dρ = (1/s) Σ eⁱ ∧ ξ⌟∇*ᵢRic + s Σ R_{l00j} Ric_{0l} e^{0j}", "rho", drho,
                         drho_derived(sys)));
  {
    Record table = Check("rho.drho_table", "dρ = F₁α₁ + F₂ + F₃ + F₄ dθ (no α₀, α₂, W₁ parts)", env.t("rho"))
                       .over(env.pts, [&](const BundlePoint& p) { return F_coefficients(sys, f, p).off_span; })
                       .done();
    // the W₁ part predicted by the curvature term; α₀ and α₂ parts must vanish
    const FormField extra = drho_derived(sys) - drho_formula(sys);
    Record w1 = Check("rho.drho_table_derived", "dρ − F₁α₁ − F₂ − F₃ − F₄dθ = s Σ R_{l00j} Ric_{0l} e^{0j}",
                      env.t("rho"))
                    .over(env.pts,
                          [&](const BundlePoint& p) {
                            const WDecomposition w = F_coefficients(sys, f, p).drho;
                            const WDecomposition e = w_decompose(frame_values(extra, m, p.locus(3)));
                            return std::max({std::abs(w.a0), std::abs(w.a2), std::abs(w.w1[0] - e.w1[0]),
                                             std::abs(w.w1[1] - e.w1[1])});
                          })
                    .done();
    add_pair(rep, table, w1);
  }
  rep.records.push_back(Check("rho.F_agreement",
                              "F₁ = ½((∇₁Ric)₀₂ − (∇₂Ric)₀₁), F₄ = −½((∇₁Ric)₀₁ + (∇₂Ric)₀₂), F₂, F₃ from ∇Ric",
                              env.t("rho"))
                            .over(env.pts,
                                  [&](const BundlePoint& p) {
                                    const FCoefficients F = F_coefficients(sys, f, p);
                                    return std::max({std::abs(F.drho.a1 - F.F1), std::abs(F.drho.a3 - F.F4),
                                                     std::abs(F.drho.w2[0] - F.F2[0]),
                                                     std::abs(F.drho.w2[1] - F.F2[1]),
                                                     std::abs(F.drho.w3[0] - F.F3[0]),
                                                     std::abs(F.drho.w3[1] - F.F3[1])});
                                  })
                            .done());
  add("rho.dr_wedge", "(2ρ − s dr)∧θ∧α₀ = 0", wedge(2.0 * f.rho - s * ext_derivative(f.r), wedge(th, a[0])),
      sys.zero(4));
  {
    const PoincareCartan pc = poincare_cartan(sys, f);
    add("rho.poincare_cartan", "d(α₂ − sρ₂∧θ) = Π = θ∧(γ − (r/2)α₁ − s dρ₂)", ext_derivative(pc.potential), pc.Pi);
  }
  {
    const FormField x = wedge(f.r, wedge(th, wedge(a[0], a[2])));
    const FormField y = -1.0 * wedge(ext_derivative(a[1]), a[2]);
    const FormField z = wedge(a[1], ext_derivative(a[2]));
    const FormField w = -0.5 * wedge(f.r, wedge(th, wedge(a[1], a[1])));
    rep.records.push_back(Check("rho.volume_chain", "r θ∧α₀∧α₂ = −dα₁∧α₂ = α₁∧dα₂ = −(r/2) θ∧α₁∧α₁",
                                env.t("rho"))
                              .over(env.pts,
                                    [&](const BundlePoint& p) {
                                      return std::max(
                                          {form_gap(x, y, m, p), form_gap(x, z, m, p), form_gap(x, w, m, p)});
                                    })
                              .done());
  }
  {
    const RhoFamily g = rho_family(sys, 0.7);
    const std::vector<std::pair<const FormField*, const FormField*>> pairs = {
        {&f.rho, &g.rho}, {&f.rho1, &g.rho1}, {&f.rho2, &g.rho2}, {&f.rho3, &g.rho3}, {&f.gamma, &g.gamma},
        {&f.r, &g.r},     {&f.c, &g.c},       {&f.p2, &g.p2},     {&f.q2, &g.q2}};
    rep.records.push_back(Check("rho.frame_independence",
                                "ρ, ρ₁, ρ₂, ρ₃, γ, r, c, p², q² unchanged under rotation of (e₁, e₂)",
                                env.t("frame_independence"))
                              .over(env.pts,
                                    [&](const BundlePoint& p) {
                                      double worst = 0;
                                      for (auto [u, v] : pairs) worst = std::max(worst, form_gap(*u, *v, m, p));
                                      return worst;
                                    })
                              .done());
  }
}

void ricci_records(const Env& env, VerificationReport& rep, const std::vector<BundlePoint>& pts) {
  if (pts.size() < 10) throw ConfigError("ricci classification needs at least 10 samples");
  const FundamentalSystem sys = build_system(env.m, env.cfg.s);
  const RicciTypeReport r = classify_ricci(sys, pts, env.t("ricci"));
  auto flag = [&](const std::string& id, const std::string& anchor, bool ok, const std::string& note = "") {
    Record rec;
    rec.id = id;
    rec.anchor = anchor;
    rec.samples = r.samples;
    rec.max_residual = ok ? 0.0 : 1.0;
    rec.tol = 0.0;
    rec.status = ok ? Status::Pass : Status::Fail;
    rec.note = note;
    rep.records.push_back(rec);
  };
  flag("ricci.paths_agree", "types from dρ ∈ sub-sums of ⟦α₁⟧⊕W₂⊕W₃⊕⟦dθ⟧ equal types from ∇Ric equalities",
       r.paths_agree, "dρ path: " + types_string(r.types) + ", ∇Ric path: " + types_string(r.types_direct));
  flag("ricci.containments", "III is included in I and II is included in IV", r.containments_hold);
  double c = 0;
  if (constant_curvature(env.m, &c))
    flag("ricci.constant_curvature", "constant curvature ⇒ Ricci types {I, II, III, IV}", r.types.size() == 4,
         types_string(r.types));
  auto mask = [](const std::vector<RicciType>& t) {
    double v = 0;
    for (RicciType x : t) v += double(1 << int(x));
    return v;
  };
  observe(rep, "ricci.types", mask(r.types), types_string(r.types) + " (bit k = type k+1)");
  observe(rep, "ricci.types_direct", mask(r.types_direct), types_string(r.types_direct));
  observe(rep, "ricci.csc", r.csc ? 1 : 0, "max |d scal| = " + num(r.dscal));
  observe(rep, "ricci.recurrent", r.recurrent ? 1 : 0, "least-squares residual " + num(r.recurrent_residual));
  observe(rep, "ricci.F1_max", r.F1);
  observe(rep, "ricci.F2_max", r.F2norm);
  observe(rep, "ricci.F3_max", r.F3norm);
  observe(rep, "ricci.F4_max", r.F4);
}

void suite_ricci(const Env& env, VerificationReport& rep) { ricci_records(env, rep, env.pts); }

/// Closed forms known to disagree with quadrature on curved metrics.
bool documented_fiber_row(const std::string& id) { return id == "r2" || id == "p2" || id == "q2"; }

std::string fiber_anchor(const FiberIntegralRow& row) {
  static const std::map<std::string, std::string> names = {{"one", "1̌"}, {"c", "č"},   {"c2", "č²"}, {"r", "ř"},
                                                           {"r2", "ř²"}, {"p2", "p̌²"}, {"q2", "q̌²"}};
  return names.at(row.id) + " = " + row.formula;
}

void fiber_records(const Env& env, VerificationReport& rep, const std::vector<Vec3<double>>& xs) {
  const FundamentalSystem sys = build_system(env.m, env.cfg.s);
  std::map<std::string, Record> rows;
  std::map<std::string, bool> mismatch;
  for (const Vec3<double>& x : xs) {
    const FiberIntegralReport b = identity_battery(sys, x, env.t("fiber"));
    for (const FiberIntegralRow& row : b.rows) {
      auto it = rows.find(row.id);
      if (it == rows.end()) {
        Record r;
        r.id = "fiber." + row.id;
        r.anchor = fiber_anchor(row);
        r.tol = row.id == "one" ? env.t("fiber_exact") : env.t("fiber");
        it = rows.emplace(row.id, r).first;
        observe(rep, "fiber." + row.id + ".quadrature", row.computed, "first base point");
        observe(rep, "fiber." + row.id + ".closed_form", row.paper, "first base point");
      }
      it->second.samples++;
      it->second.max_residual = std::max(it->second.max_residual, row.rel_err);
    }
  }
  for (auto& [id, r] : rows) {
    r.status = r.max_residual <= r.tol ? Status::Pass : Status::Fail;
    if (r.status == Status::Fail && documented_fiber_row(id)) {
      r.status = Status::MismatchVsPaper;
      r.note = "quadrature (converged under grid doubling) is authoritative; closed form disagrees";
    }
    if (r.note.empty()) r.note = "relative error max(1, |closed form|)";
    rep.records.push_back(r);
  }

  const double s = env.cfg.s;
  rep.records.push_back(Check("fiber.pushforward_vol", "π_* vol_𝒮 = 4πs² vol_M", env.t("fiber_exact"))
                            .note("relative")
                            .once([&] {
                              double worst = 0;
                              for (const auto& x : xs) {
                                const PushforwardReport pr = pushforward_checks(sys, x);
                                worst = std::max(worst, std::abs(pr.vol - pr.expected_vol) / pr.expected_vol);
                              }
                              return worst;
                            })
                            .done());
  rep.records.push_back(Check("fiber.pushforward_zero", "π_*(θ∧α₂) = 0, π_*(α₀∧α₂) = 0", env.t("fiber_exact"))
                            .once([&] {
                              double worst = 0;
                              for (const auto& x : xs) {
                                const PushforwardReport pr = pushforward_checks(sys, x);
                                worst = std::max({worst, pr.theta_alpha2, pr.alpha0_alpha2});
                              }
                              return worst;
                            })
                            .done());
  {
    const RhoFamily fam = rho_family(sys);
    const std::array<double, 9> rot = {0.36, 0.48, -0.8, -0.8, 0.6, 0.0, 0.48, 0.64, 0.6};
    auto r_of = [&](const BundlePoint& p) { return scalar_at(fam.r, env.m, p); };
    rep.records.push_back(Check("fiber.rotation_invariance", "f̌(x) = (1/s²) ∫ f α₂ is independent of the fibre basis",
                                env.t("fiber_exact"))
                              .note("f = r; relative")
                              .once([&] {
                                double worst = 0;
                                for (const auto& x : xs) {
                                  const double u = fiber_integrate(env.m, s, x, r_of);
                                  const double v = fiber_integrate(env.m, s, x, r_of, FiberGrid::make(), &rot);
                                  worst = std::max(worst, std::abs(u - v) / std::max(1.0, std::abs(u)));
                                }
                                return worst;
                              })
                              .done());
  }
  rep.records.push_back(Check("fiber.lift_square", "((φ̃)²)ˇ = (4π/3)|φ|²", env.t("fiber_exact"))
                            .note("relative")
                            .once([&] {
                              double worst = 0;
                              for (const auto& x : xs) {
                                const TensorLiftResult t = lift_square_integral(env.m, x, {0.3, -1.1, 0.7});
                                worst = std::max(worst, std::abs(t.quadrature - t.closed_form) /
                                                            std::max(1.0, std::abs(t.closed_form)));
                              }
                              return worst;
                            })
                            .done());
  rep.records.push_back(Check("fiber.lift_diagonal", "(g₁(u,u))ˇ = (4π/3) tr_g g₁", env.t("fiber_exact"))
                            .note("relative")
                            .once([&] {
                              double worst = 0;
                              const Mat3<double> g1 = {0.9, 0.2, -0.4, 0.5, -1.3, 0.1, 0.3, 0.6, 2.0};
                              for (const auto& x : xs) {
                                const TensorLiftResult t = lift_diagonal_integral(env.m, x, g1);
                                worst = std::max(worst, std::abs(t.quadrature - t.closed_form) /
                                                            std::max(1.0, std::abs(t.closed_form)));
                              }
                              return worst;
                            })
                            .done());
  rep.records.push_back(Check("fiber.alpha2_density", "α₂ = s² dφ dz on the fibre, so f̌(x) = ∫∫ f dφ dz",
                              env.t("fiber_exact"))
                            .once([&] {
                              double worst = 0;
                              for (const auto& x : xs)
                                for (double phi : {0.3, 2.1, 4.4})
                                  for (double z : {-0.7, 0.1, 0.85})
                                    worst = std::max(worst, std::abs(fiber_alpha2_density(sys, x, phi, z) - s * s));
                              return worst;
                            })
                            .done());
}

std::vector<Vec3<double>> fiber_points(const Env& env) {
  if (env.cfg.x) return {*env.cfg.x};
  std::vector<Vec3<double>> xs;
  for (const BundlePoint& p : env.pts) {
    if (xs.size() == 3) break;
    xs.push_back(p.x);
  }
  return xs;
}

void suite_fiber(const Env& env, VerificationReport& rep) { fiber_records(env, rep, fiber_points(env)); }

void suite_lagrangian(const Env& env, VerificationReport& rep) {
  const double s = env.cfg.s;
  const ChartMetric& m = env.m;
  const FundamentalSystem sys = build_system(m, s);
  const RhoFamily fam = rho_family(sys);

  {
    std::vector<InvariantLagrangian> Ls = {{1, 0, 1, 0},  {1, 0, -1, 0}, {1, 1, 1, 0},     {1, -1, 1, 0},
                                           {2, 0, 2, 0},  {1, 0.5, -1, 0.3}, {0, 0, 0, 1},  {0, 0, 1, 0},
                                           {0.7, 1, 1 / 0.7, 0}};
    std::mt19937_64 rng(env.cfg.seed ^ 0x5bd1e995u);
    std::uniform_real_distribution<double> U(-2, 2);
    for (int k = 0; k < 16; ++k) Ls.push_back({U(rng), U(rng), U(rng), U(rng)});
    Record r;
    r.id = "lagrangian.classify";
    r.anchor = "degenerate if Λ∧Λ = 0 ⇔ t₀t₂ − t₁² − t₃² = 0; *₄Λ = ±Λ ⇔ t₂ = ±t₀, t₁ = ∓t₁, t₃ = ∓t₃";
    r.tol = 0;
    for (const auto& L : Ls) {
      ++r.samples;
      if (!lagrangian_classify(L, env.t("algebra")).agree) r.max_residual += 1;
    }
    r.status = r.max_residual <= r.tol ? Status::Pass : Status::Fail;
    r.note = "count of coefficient-vs-direct disagreements";
    rep.records.push_back(r);
  }
  {
    const InvariantLagrangian L{0.8, -0.3, 1.2, 0.45};
    const DLambdaSplit d = dLambda_decompose(L, sys, fam);
    rep.records.push_back(form_identity(env, "lagrangian.dLambda",
                                        "dΛ = θ∧Λ'₀ + Λ'₁, Λ'₀ = −rt₁α₀ + ((2t₀ − s²t₂r)/2s²)α₁ + (2t₁/s²)α₂ + "
                                        "t₂γ, Λ'₁ = st₂ α₀∧ρ",
                                        "lagrangian", d.dLambda, d.predicted));
  }
  rep.records.push_back(
      form_identity(env, "lagrangian.ddtheta", "d(dθ) = 0", "lagrangian", ext_derivative(sys.dtheta), sys.zero(3)));

  {
    // integrity conditions are algebraic in the adapted frame
    Record lemma;
    lemma.id = "lagrangian.integrity_lemma";
    lemma.anchor = "b₀ = t₀b₃ ∓ b₁ = t₀b₄ ∓ b₂ = 0 spans {β : β∧Λ₂ = 0}";
    lemma.tol = env.t("algebra");
    Record printed = lemma;
    printed.id = "lagrangian.integrity_span";
    printed.anchor = "{β : β∧Λ₂ = 0} spanned by e¹ ± t₀e³ and e² ± t₀e⁴";
    std::vector<double> t0s = {1.0, 0.7, 1.9};
    if (env.cfg.t0) t0s.push_back(*env.cfg.t0);
    for (double t0 : t0s)
      for (Branch br : {Branch::Upper, Branch::Lower}) {
        const InvariantLagrangian L = InvariantLagrangian::lambda2(t0, br);
        const IntegrityKernel k = integrity_kernel(L);
        const double dim_gap = k.basis.size() == 2 ? 0.0 : 1.0;
        double w = 0;
        for (const auto& b : integrity_conditions_basis(t0, br)) w = std::max(w, wedge_residual(b, L));
        lemma.max_residual = std::max({lemma.max_residual, w, dim_gap});
        const double sg = branch_sign(br);
        double wp = 0;
        for (const auto& b : {std::array<double, 5>{0, 1, 0, sg * t0, 0}, std::array<double, 5>{0, 0, 1, 0, sg * t0}})
          wp = std::max(wp, wedge_residual(b, L));
        printed.max_residual = std::max(printed.max_residual, wp);
        ++lemma.samples;
        ++printed.samples;
      }
    lemma.status = lemma.max_residual <= lemma.tol ? Status::Pass : Status::Fail;
    printed.status = printed.max_residual <= printed.tol ? Status::Pass : Status::Fail;
    add_pair(rep, printed, lemma);
  }

  double c = 0;
  if (!constant_curvature(m, &c)) return;
  const BundlePoint& p0 = env.pts.front();
  {
    // Λ₁ = t₀α₀ + t₂α₂ + t₃dθ with c = t₀/(s²t₂)
    const InvariantLagrangian L1 = InvariantLagrangian::lambda1(c * s * s, 1.0, 0.5);
    const FormField l1 = L1.bind(sys);
    rep.records.push_back(form_identity(env, "lagrangian.dLambda1_closed",
                                        "dΛ₁ = 0 for constant sectional curvature c = t₀/(s²t₂)", "lagrangian",
                                        ext_derivative(l1), sys.zero(3)));
    Check cases("lagrangian.principal_ideal_cases", "dΛ = ψ∧Λ for Λ ∝ dθ and for Λ₁ with c = t₀/(s²t₂)",
                env.t("lagrangian"));
    cases.over(env.pts, [&](const BundlePoint& p) {
      return std::max(principal_ideal_fit(l1, sys, p).residual,
                      principal_ideal_fit(InvariantLagrangian{0, 0, 0, 1}.bind(sys), sys, p).residual);
    });
    rep.records.push_back(cases.done());
    // a non-degenerate Λ outside those cases
    const InvariantLagrangian G{1.0, 0.3, c * s * s + 0.8, 0.2};
    Check generic("lagrangian.principal_ideal_generic",
                  "dΛ = ψ∧Λ fails for a non-degenerate Λ outside the two cases", 100 * env.t("lagrangian"));
    generic.note("residual of the least-squares ψ at the first sample must exceed tol")
        .once([&] { return principal_ideal_fit(G.bind(sys), sys, p0).residual; });
    rep.records.push_back(generic.done_expect_nonzero());
  }
  if (c < 0) {
    const double t0 = s * std::sqrt(-c);
    std::vector<std::pair<FormField, FormField>> printed, derived;
    for (Branch br : {Branch::Upper, Branch::Lower}) {
      const FormField l2 = InvariantLagrangian::lambda2(t0, br).bind(sys);
      const double k = branch_sign(br) * 2 * t0 / (s * s);
      printed.push_back({ext_derivative(l2), -k * wedge(sys.theta, l2)});
      derived.push_back({ext_derivative(l2), k * wedge(sys.theta, l2)});
    }
    auto both = [&](const std::string& id, const std::string& anchor, const auto& list) {
      return Check(id, anchor, env.t("lagrangian"))
          .over(env.pts,
                [&](const BundlePoint& p) {
                  double w = 0;
                  for (const auto& [l, r] : list) w = std::max(w, form_gap(l, r, m, p));
                  return w;
                })
          .done();
    };
    add_pair(rep,
             both("lagrangian.dLambda2", "dΛ₂ = ∓(2t₀/s²) θ∧Λ₂ for Λ₂ = t₀α₀ ± α₁ + (1/t₀)α₂, c = −t₀²/s²", printed),
             both("lagrangian.dLambda2_derived", "dΛ₂ = ±(2t₀/s²) θ∧Λ₂ for Λ₂ = t₀α₀ ± α₁ + (1/t₀)α₂, c = −t₀²/s²",
                  derived));
  }
}

// ---------------------------------------------------------------------------
// Surfaces.

struct NamedSurface {
  std::string key;
  SurfaceImmersion S;
};

std::vector<NamedSurface> catalog_surfaces(double c) {
  return {{"horosphere", make_surface("horosphere", {{"h", 1.0}, {"c", c}})},
          {"geodesic_sphere", make_surface("geodesic_sphere", {{"a", 1.0}, {"c", c}})},
          {"vertical_plane", make_surface("vertical_plane", {{"c", c}})},
          {"euclidean_sphere", make_surface("euclidean_sphere", {{"a", 2.0}})},
          {"graph", make_surface("graph", {{"amp", 0.3}})}};
}

ChartMetric ambient_of(const SurfaceImmersion& S) {
  if (!S.ambient()) throw ConfigError("surface '" + S.name() + "' has no ambient metric");
  return *S.ambient();
}

void surface_geometry_records(const Env& env, VerificationReport& rep, const std::string& key,
                              const SurfaceImmersion& S) {
  const ChartMetric amb = ambient_of(S).with_backend(env.cfg.backend);
  const FundamentalSystem sys = build_system(amb, 1.0);
  std::vector<double> ga, gb, wa, wb;
  gauss_legendre(4, ga, wa);
  gauss_legendre(4, gb, wb);
  auto map = [](double t, std::array<double, 2> r) { return r[0] + 0.5 * (t + 1) * (r[1] - r[0]); };
  Record pull;
  pull.id = "surface.pullback." + key;
  pull.anchor = "f̂*α₀, f̂*α₁, f̂*α₂ = (1, −(λ₁+λ₂), λ₁λ₂) vol_N";
  pull.tol = env.t("surface");
  Record leg = pull;
  leg.id = "surface.legendre." + key;
  leg.anchor = "f̂*θ = 0";
  try {
    for (double ta : ga)
      for (double tb : gb) {
        const GaussLiftFactors g = gauss_lift_pullback(S, sys, map(ta, S.a_range()), map(tb, S.b_range()));
        pull.max_residual = std::max({pull.max_residual, std::abs(g.alpha0 - g.expected0),
                                      std::abs(g.alpha1 - g.expected1), std::abs(g.alpha2 - g.expected2)});
        leg.max_residual = std::max(leg.max_residual, std::abs(g.theta));
        ++pull.samples;
        ++leg.samples;
      }
    pull.status = pull.max_residual <= pull.tol ? Status::Pass : Status::Fail;
    leg.status = leg.max_residual <= leg.tol ? Status::Pass : Status::Fail;
  } catch (const std::exception& e) {
    for (Record* r : {&pull, &leg}) {
      r->status = Status::Fail;
      r->max_residual = kBad;
      r->note = e.what();
    }
  }
  rep.records.push_back(pull);
  rep.records.push_back(leg);
  rep.records.push_back(Check("surface.gauss." + key, "K_N = c + λ₁λ₂ equals the intrinsic curvature of I",
                              env.t("surface_curvature"))
                            .note("intrinsic side by order-4 finite differences")
                            .once([&] { return surface_geometry(S, amb, 4, 4).max_curvature_gap; })
                            .done());
}

/// Functional consistency over the hyperbolic catalog surfaces at curvature −t₀².
std::pair<Record, Record> functional_records(const Env& env, const std::string& suffix, const std::vector<double>& t0s) {
  Record printed;
  printed.id = "surface.functional" + suffix;
  printed.anchor = "(1/t₀) ∫_N f̂*Λ₂ = 𝓕_{Λ₂}(N) = ∫_N (K_N ∓ 2t₀H_N + 2t₀²) vol_N";
  printed.tol = env.t("functional");
  Record derived = printed;
  derived.id = "surface.functional" + suffix + "_derived";
  derived.anchor = "t₀ ∫_N f̂*Λ₂ = 𝓕_{Λ₂}(N)";
  std::string ts;
  for (double t0 : t0s) {
    ts += (ts.empty() ? "" : ", ") + num(t0);
    for (const NamedSurface& ns : catalog_surfaces(-t0 * t0)) {
      if (!ns.S.ambient() || ns.key == "euclidean_sphere" || ns.key == "graph") continue;
      for (Branch br : {Branch::Upper, Branch::Lower}) {
        const WeingartenReport w = weingarten_functional(ns.S, *ns.S.ambient(), t0, br, 12, 12);
        printed.max_residual = std::max(printed.max_residual, w.printed_gap);
        derived.max_residual = std::max(derived.max_residual, w.derived_gap);
        ++printed.samples;
        ++derived.samples;
      }
    }
  }
  printed.note = derived.note = "relative gap; t₀ ∈ {" + ts + "}; horosphere, geodesic sphere, vertical plane";
  printed.status = printed.max_residual <= printed.tol ? Status::Pass : Status::Fail;
  derived.status = derived.max_residual <= derived.tol ? Status::Pass : Status::Fail;
  return {printed, derived};
}

void suite_surface(const Env& env, VerificationReport& rep) {
  for (const NamedSurface& ns : catalog_surfaces(-1.0)) surface_geometry_records(env, rep, ns.key, ns.S);

  const SurfaceImmersion horo = make_surface("horosphere", {{"h", 1.0}, {"c", -1.0}});
  rep.records.push_back(Check("surface.weingarten.horosphere", "K_N ∓ 2t₀H_N + 2t₀² = 0 (t₀ = 1, upper sign)",
                              env.t("surface"))
                            .once([&] {
                              return weingarten_functional(horo, *horo.ambient(), 1.0, Branch::Upper).max_residual;
                            })
                            .done());
  for (double a : {0.5, 1.0, 2.0}) {
    const SurfaceImmersion S = make_surface("geodesic_sphere", {{"a", a}, {"c", -1.0}});
    const double closed = 1 / std::pow(std::sinh(a), 2) - 2 / std::tanh(a) + 2;
    char id[64];
    std::snprintf(id, sizeof id, "surface.weingarten.geodesic_sphere_a%g", a);
    rep.records.push_back(Check(id, "K_N − 2t₀H_N + 2t₀² = csch²a − 2coth a + 2 on a geodesic sphere (t₀ = 1)",
                                env.t("surface"))
                              .once([&] {
                                const WeingartenReport w = weingarten_functional(S, *S.ambient(), 1.0, Branch::Upper);
                                return std::max(std::abs(w.max_residual - closed), std::abs(w.mean_residual - closed));
                              })
                              .done());
  }
  {
    auto [p, d] = functional_records(env, "_unit", {1.0});
    rep.records.push_back(p);
    rep.records.push_back(d);
  }
  {
    auto [p, d] = functional_records(env, "", {1.0, 0.7, 1.5});
    add_pair(rep, p, d);
  }
}

void suite_2d(const Env& env, VerificationReport& rep) {
  const double s = env.cfg.s;
  const FundamentalSystem sys = build_system(env.m, s);
  const FormField c = sectional_field(sys);
  const FormField& th = sys.theta;
  const auto& a = sys.alpha;
  const int D = 3;
  rep.records.push_back(frame_identity(env, "2d.frame.theta", "θ = s e⁰", th, s * frame_basis(D, {0})));
  rep.records.push_back(frame_identity(env, "2d.frame.alpha0", "α₀ = e¹", a[0], frame_basis(D, {1})));
  rep.records.push_back(frame_identity(env, "2d.frame.alpha1", "α₁ = e²", a[1], frame_basis(D, {2})));
  rep.records.push_back(form_identity(env, "2d.dtheta", "dθ = α₁∧α₀", "structure", ext_derivative(th),
                                      wedge(a[1], a[0])));
  rep.records.push_back(form_identity(env, "2d.dtheta_bilinear", "dθ(v,w) = ⟨v,Bw⟩ − ⟨w,Bv⟩", "structure",
                                      ext_derivative(th), sys.dtheta));
  rep.records.push_back(form_identity(env, "2d.dalpha1", "dα₁ = c α₀∧θ", "structure", ext_derivative(a[1]),
                                      wedge(c, wedge(a[0], th))));
  rep.records.push_back(form_identity(env, "2d.dalpha0", "dα₀ = (1/s²) θ∧α₁", "structure", ext_derivative(a[0]),
                                      (1 / (s * s)) * wedge(th, a[1])));
}

using SuiteFn = void (*)(const Env&, VerificationReport&);

const std::vector<std::pair<std::string, std::pair<int, SuiteFn>>>& suite_table() {
  static const std::vector<std::pair<std::string, std::pair<int, SuiteFn>>> t = {
      {"structure", {3, suite_structure}}, {"hodge", {3, suite_hodge}},   {"rho", {3, suite_rho}},
      {"ricci", {3, suite_ricci}},         {"fiber", {3, suite_fiber}},   {"lagrangian", {3, suite_lagrangian}},
      {"surface", {3, suite_surface}},     {"2d", {2, suite_2d}}};
  return t;
}

std::map<std::string, std::string> echo(const RunConfig& cfg) {
  std::map<std::string, std::string> e;
  e["command"] = cfg.command;
  e["metric"] = cfg.metric;
  for (const auto& [k, v] : cfg.metric_params) e["metric." + k] = num(v);
  e["s"] = num(cfg.s);
  e["samples"] = std::to_string(cfg.samples);
  e["seed"] = std::to_string(cfg.seed);
  e["backend"] = to_string(cfg.backend);
  std::string suites;
  for (const auto& s : cfg.suites) suites += (suites.empty() ? "" : ",") + s;
  e["suites"] = suites;
  if (!cfg.surface.empty()) e["surface"] = cfg.surface;
  for (const auto& [k, v] : cfg.surface_params) e["surface." + k] = num(v);
  if (cfg.t0) e["t0"] = num(*cfg.t0);
  e["branch"] = to_string(cfg.branch);
  if (cfg.x) e["x"] = num((*cfg.x)[0]) + "," + num((*cfg.x)[1]) + "," + num((*cfg.x)[2]);
  for (const auto& [k, v] : cfg.tolerances()) e["tol." + k] = num(v);
  return e;
}

Env make_env(const RunConfig& cfg) {
  ChartMetric m = cfg.make_chart();
  if (!(cfg.s > 0)) throw ConfigError("s must be positive");
  if (cfg.samples < 1) throw ConfigError("samples must be at least 1");
  std::vector<BundlePoint> pts = sample_points(m, cfg.s, cfg.samples, cfg.seed);
  return Env{cfg, cfg.tolerances(), std::move(m), std::move(pts)};
}

VerificationReport start(const RunConfig& cfg) {
  VerificationReport r;
  r.config = echo(cfg);
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------
// Configuration.

std::map<std::string, double> default_tolerances(Backend backend) {
  const bool fd = backend == Backend::FiniteDifference;
  return {
      {"structure", fd ? 1e-4 : 1e-7},
      {"frame", fd ? 1e-9 : 1e-10},
      {"curvature", fd ? 1e-6 : 1e-8},
      {"hodge", fd ? 1e-5 : 1e-6},
      {"laplacian", fd ? 1e-3 : 1e-5},
      {"rho", 1e-5},
      {"frame_independence", fd ? 1e-8 : 1e-9},
      {"ricci", fd ? 1e-5 : 1e-6},
      {"fiber_exact", 1e-8},
      {"fiber", fd ? 1e-5 : 1e-6},
      {"lagrangian", 1e-6},
      {"algebra", 1e-10},
      {"surface", 1e-5},
      {"surface_curvature", 1e-6},
      {"functional", 1e-6},
  };
}

std::map<std::string, double> RunConfig::tolerances() const {
  std::map<std::string, double> t = default_tolerances(backend);
  if (tol)
    for (auto& [k, v] : t) v = *tol;
  for (const auto& [k, v] : tol_overrides) {
    if (!t.count(k)) throw ConfigError("unknown tolerance '" + k + "'");
    if (!(v >= 0)) throw ConfigError("tolerance '" + k + "' must be non-negative");
    t[k] = v;
  }
  return t;
}

ChartMetric RunConfig::make_chart() const {
  try {
    return make_metric(metric, metric_params, backend);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& [k, v] : suite_table()) n.push_back(k);
    return n;
  }();
  return names;
}

int suite_dimension(const std::string& suite) {
  for (const auto& [k, v] : suite_table())
    if (k == suite) return v.first;
  throw ConfigError("unknown suite '" + suite + "'");
}

RunConfig config_from_settings(const std::map<std::string, std::string>& settings) {
  RunConfig c;
  for (const auto& [key, v] : settings) {
    if (key == "command") {
      if (v != "verify" && v != "classify" && v != "integrate" && v != "surface")
        throw ConfigError("unknown command '" + v + "'");
      c.command = v;
    } else if (key == "metric") {
      c.metric = v;
    } else if (key == "c" || key == "eps") {
      c.metric_params[key] = parse_double(key, v);
    } else if (key == "s") {
      c.s = parse_double(key, v);
    } else if (key == "seed") {
      try {
        size_t used = 0;
        c.seed = std::stoull(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
      } catch (const std::exception&) {
        throw ConfigError("invalid seed '" + v + "'");
      }
    } else if (key == "samples") {
      const double n = parse_double(key, v);
      if (n != std::floor(n) || n < 1) throw ConfigError("samples must be a positive integer");
      c.samples = int(n);
    } else if (key == "backend") {
      try {
        c.backend = backend_from_string(v);
      } catch (const std::exception& e) {
        throw ConfigError(e.what());
      }
    } else if (key == "tol") {
      c.tol = parse_double(key, v);
    } else if (key.rfind("tol.", 0) == 0) {
      c.tol_overrides[key.substr(4)] = parse_double(key, v);
    } else if (key == "suites") {
      c.suites.clear();
      for (const std::string& s : split(v, ',')) {
        suite_dimension(s);
        c.suites.push_back(s);
      }
    } else if (key == "format") {
      if (v != "text" && v != "json") throw ConfigError("format must be text or json");
      c.format = v;
    } else if (key == "out") {
      c.out = v;
    } else if (key == "surface") {
      c.surface = v;
    } else if (key == "a" || key == "h" || key == "amp") {
      c.surface_params[key] = parse_double(key, v);
    } else if (key == "t0") {
      c.t0 = parse_double(key, v);
      if (!(*c.t0 > 0)) throw ConfigError("t0 must be positive");
    } else if (key == "branch") {
      try {
        c.branch = branch_from_string(v);
      } catch (const std::exception& e) {
        throw ConfigError(e.what());
      }
    } else if (key == "x") {
      const auto parts = split(v, ',');
      if (parts.size() < 2 || parts.size() > 3) throw ConfigError("x needs 2 or 3 comma-separated coordinates");
      Vec3<double> x{};
      for (size_t i = 0; i < parts.size(); ++i) x[i] = parse_double("x", parts[i]);
      c.x = x;
    } else {
      throw ConfigError("unknown setting '" + key + "'");
    }
  }
  c.tolerances();  // validate override names
  return c;
}

std::map<std::string, std::string> parse_config_text(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::map<std::string, std::string> merge_settings(
    const std::map<std::string, std::string>& file,
    const std::function<std::optional<std::string>(const std::string&)>& env,
    const std::map<std::string, std::string>& flags) {
  std::map<std::string, std::string> out = file;
  static const std::vector<std::string> keys = {"metric",  "c",     "eps",     "s",    "seed",  "samples",
                                                "backend", "tol",   "suites",  "format", "out", "surface",
                                                "a",       "h",     "amp",     "t0",   "branch", "x"};
  auto env_name = [](std::string k) {
    for (char& ch : k) ch = (ch == '.' || ch == '-') ? '_' : char(std::toupper(static_cast<unsigned char>(ch)));
    return "SBL_" + k;
  };
  if (env) {
    for (const auto& k : keys)
      if (auto v = env(env_name(k))) out[k] = *v;
    for (const auto& [k, dflt] : default_tolerances(Backend::Dual)) {
      const std::string key = "tol." + k;
      if (auto v = env(env_name(key))) out[key] = *v;
    }
  }
  for (const auto& [k, v] : flags) out[k] = v;
  return out;
}

// ---------------------------------------------------------------------------
// Reports.

std::string to_string(Status s) {
  switch (s) {
    case Status::Pass:
      return "pass";
    case Status::Fail:
      return "fail";
    case Status::MismatchVsPaper:
      return "mismatch-vs-paper";
  }
  return "fail";
}

Status status_from_string(const std::string& s) {
  if (s == "pass") return Status::Pass;
  if (s == "fail") return Status::Fail;
  if (s == "mismatch-vs-paper") return Status::MismatchVsPaper;
  throw std::invalid_argument("unknown status '" + s + "'");
}

void VerificationReport::finalize() {
  std::stable_sort(records.begin(), records.end(), [](const Record& a, const Record& b) { return a.id < b.id; });
  std::stable_sort(observations.begin(), observations.end(),
                   [](const Observation& a, const Observation& b) { return a.id < b.id; });
  for (size_t i = 1; i < records.size(); ++i)
    if (records[i].id == records[i - 1].id) throw std::logic_error("duplicate record id " + records[i].id);
  summary = Summary{};
  summary.records = int(records.size());
  summary.observations = int(observations.size());
  for (const Record& r : records) {
    if (r.status == Status::Pass) ++summary.passed;
    if (r.status == Status::Fail) ++summary.failures;
    if (r.status == Status::MismatchVsPaper) ++summary.mismatches;
  }
}

const Record* VerificationReport::find(const std::string& id) const {
  for (const Record& r : records)
    if (r.id == id) return &r;
  return nullptr;
}

std::string emit_text(const VerificationReport& r) {
  std::ostringstream o;
  o << "config:";
  for (const auto& [k, v] : r.config) o << ' ' << k << '=' << v;
  o << "\n\n";
  size_t w = 2;
  for (const Record& rec : r.records) w = std::max(w, rec.id.size());
  char buf[512];
  std::snprintf(buf, sizeof buf, "%-*s  %-17s  %10s  %9s  %7s  %s\n", int(w), "id", "status", "residual", "tol",
                "samples", "identity");
  o << buf;
  for (const Record& rec : r.records) {
    std::snprintf(buf, sizeof buf, "%-*s  %-17s  %10.3e  %9.1e  %7d  ", int(w), rec.id.c_str(),
                  to_string(rec.status).c_str(), rec.max_residual, rec.tol, rec.samples);
    o << buf << rec.anchor;
    if (!rec.note.empty()) o << "  [" << rec.note << ']';
    o << '\n';
  }
  if (!r.observations.empty()) {
    o << "\nobservations:\n";
    for (const Observation& ob : r.observations) {
      std::snprintf(buf, sizeof buf, "  %-*s  %.10g", int(w), ob.id.c_str(), ob.value);
      o << buf;
      if (!ob.note.empty()) o << "  " << ob.note;
      o << '\n';
    }
  }
  const Summary& s = r.summary;
  o << "\nsummary: " << s.records << " records, " << s.passed << " passed, " << s.failures << " failed, "
    << s.mismatches << " mismatch-vs-paper, " << s.observations << " observations\n";
  return o.str();
}

std::string emit_json(const VerificationReport& r) {
  json j;
  j["config"] = r.config;
  j["records"] = json::array();
  for (const Record& rec : r.records)
    j["records"].push_back({{"id", rec.id},
                            {"anchor", rec.anchor},
                            {"samples", rec.samples},
                            {"max_residual", rec.max_residual},
                            {"tol", rec.tol},
                            {"status", to_string(rec.status)},
                            {"note", rec.note}});
  j["observations"] = json::array();
  for (const Observation& ob : r.observations)
    j["observations"].push_back({{"id", ob.id}, {"value", ob.value}, {"note", ob.note}});
  j["summary"] = {{"records", r.summary.records},
                  {"passed", r.summary.passed},
                  {"failures", r.summary.failures},
                  {"mismatches", r.summary.mismatches},
                  {"observations", r.summary.observations}};
  return j.dump(2) + "\n";
}

VerificationReport parse_json(const std::string& text) {
  const json j = json::parse(text);
  VerificationReport r;
  r.config = j.at("config").get<std::map<std::string, std::string>>();
  for (const auto& x : j.at("records"))
    r.records.push_back({x.at("id").get<std::string>(), x.at("anchor").get<std::string>(), x.at("samples").get<int>(),
                         x.at("max_residual").get<double>(), x.at("tol").get<double>(),
                         status_from_string(x.at("status").get<std::string>()), x.at("note").get<std::string>()});
  for (const auto& x : j.at("observations"))
    r.observations.push_back(
        {x.at("id").get<std::string>(), x.at("value").get<double>(), x.at("note").get<std::string>()});
  const auto& s = j.at("summary");
  r.summary = {s.at("records").get<int>(), s.at("passed").get<int>(), s.at("failures").get<int>(),
               s.at("mismatches").get<int>(), s.at("observations").get<int>()};
  return r;
}

void emit_report(const VerificationReport& r, const std::string& format, const std::string& out) {
  const std::string text = format == "json" ? emit_json(r) : emit_text(r);
  if (out.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write report to '" + out + "'");
  f << text;
  if (!f) throw std::runtime_error("cannot write report to '" + out + "'");
}

// ---------------------------------------------------------------------------
// Commands.

std::vector<BundlePoint> sample_points(const ChartMetric& m, double s, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const int dim = m.dim();
  const ChartDomain& d = m.domain();
  std::vector<BundlePoint> pts;
  pts.reserve(count);
  int guard = 0;
  while (int(pts.size()) < count) {
    if (++guard > 1000 * count) throw GeometryError("sampling box yields no valid chart points");
    Vec3<double> x{};
    for (int i = 0; i < dim; ++i) {
      std::uniform_real_distribution<double> U(d.sample_lo[i], d.sample_hi[i]);
      x[i] = U(rng);
    }
    std::normal_distribution<double> N(0.0, 1.0);
    std::array<double, 3> z{};
    for (int i = 0; i < dim; ++i) z[i] = N(rng);
    if (!m.contains(x)) continue;
    // g-orthonormal basis by Gram–Schmidt on the chart axes
    const Mat3<double> g = m.g(x);
    std::array<Vec3<double>, 3> E{};
    for (int i = 0; i < dim; ++i) {
      Vec3<double> v{};
      v[i] = 1.0;
      for (int k = 0; k < i; ++k) {
        const double proj = g_dot(g, v, E[k], dim);
        for (int q = 0; q < dim; ++q) v[q] -= proj * E[k][q];
      }
      const double n = std::sqrt(g_dot(g, v, v, dim));
      for (int q = 0; q < dim; ++q) E[i][q] = v[q] / n;
    }
    Vec3<double> u{};
    for (int i = 0; i < dim; ++i)
      for (int q = 0; q < dim; ++q) u[q] += z[i] * E[i][q];
    double norm = 0;
    for (int i = 0; i < dim; ++i) norm += z[i] * z[i];
    if (norm < 1e-12) continue;
    pts.push_back(make_bundle_point(m, x, u, s));
  }
  return pts;
}

VerificationReport cmd_verify(const RunConfig& cfg) {
  const Env env = make_env(cfg);
  std::vector<std::string> suites = cfg.suites;
  if (suites.empty())
    for (const auto& [k, v] : suite_table())
      if (v.first == env.dim()) suites.push_back(k);
  for (const std::string& s : suites) {
    const int need = suite_dimension(s);
    if (need != env.dim())
      throw ConfigError("suite '" + s + "' needs a " + std::to_string(need) + "-dimensional base, metric '" +
                        cfg.metric + "' is " + std::to_string(env.dim()) + "-dimensional");
  }
  VerificationReport rep = start(cfg);
  for (const auto& [name, entry] : suite_table())
    if (std::find(suites.begin(), suites.end(), name) != suites.end()) entry.second(env, rep);
  rep.finalize();
  return rep;
}

VerificationReport cmd_classify(const RunConfig& cfg) {
  const Env env = make_env(cfg);
  if (env.dim() != 3) throw ConfigError("classify needs a 3-dimensional metric");
  VerificationReport rep = start(cfg);
  ricci_records(env, rep, env.pts);
  rep.finalize();
  return rep;
}

VerificationReport cmd_integrate(const RunConfig& cfg) {
  const Env env = make_env(cfg);
  if (env.dim() != 3) throw ConfigError("integrate needs a 3-dimensional metric");
  if (cfg.x && !env.m.contains(*cfg.x)) throw ConfigError("x lies outside the chart domain");
  VerificationReport rep = start(cfg);
  fiber_records(env, rep, fiber_points(env));
  rep.finalize();
  return rep;
}

VerificationReport cmd_surface(const RunConfig& cfg) {
  if (!cfg.t0) throw ConfigError("surface requires --t0");
  const double t0 = *cfg.t0;
  const std::string name = cfg.surface.empty() ? "horosphere" : cfg.surface;
  std::map<std::string, double> params = cfg.surface_params;
  const bool hyperbolic = name == "horosphere" || name == "geodesic_sphere" || name == "vertical_plane";
  if (hyperbolic) {
    const double want = -t0 * t0;
    const auto it = cfg.metric_params.find("c");
    if (it != cfg.metric_params.end() && std::abs(it->second - want) > 1e-12)
      throw ConfigError("the Weingarten functional needs curvature c = −t0², got c = " + num(it->second));
    params["c"] = want;
  }
  SurfaceImmersion S;
  try {
    S = make_surface(name, params);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  RunConfig local = cfg;
  local.metric = S.ambient() ? S.ambient()->name() : cfg.metric;
  local.metric_params = S.ambient() ? S.ambient()->params() : cfg.metric_params;
  local.samples = 1;
  const Env env = make_env(local);
  VerificationReport rep = start(cfg);
  surface_geometry_records(env, rep, name, S);

  const ChartMetric amb = ambient_of(S);
  const SurfaceGeometry geo = surface_geometry(S, amb, 4, 4);
  double lmin = 1e300, lmax = -1e300;
  for (const auto& smp : geo.samples) {
    lmin = std::min(lmin, smp.lambda1);
    lmax = std::max(lmax, smp.lambda2);
  }
  observe(rep, "surface." + name + ".lambda_min", lmin);
  observe(rep, "surface." + name + ".lambda_max", lmax);
  if (!hyperbolic) {
    observe(rep, "surface." + name + ".weingarten", 0, "ambient is not hyperbolic; functional not defined");
  } else {
    const WeingartenReport w = weingarten_functional(S, amb, t0, cfg.branch);
    observe(rep, "surface." + name + ".stationarity_max", w.max_residual,
            "max |K_N ∓ 2t₀H_N + 2t₀²|, branch " + to_string(cfg.branch));
    observe(rep, "surface." + name + ".stationary", w.max_residual <= env.t("surface") ? 1 : 0);
    observe(rep, "surface." + name + ".functional", w.value, "𝓕_{Λ₂}(N) by quadrature");
    observe(rep, "surface." + name + ".area", w.area);
    observe(rep, "surface." + name + ".pullback_integral", w.pullback, "∫ f̂*Λ₂");
    Record printed;
    printed.id = "surface.functional";
    printed.anchor = "(1/t₀) ∫_N f̂*Λ₂ = 𝓕_{Λ₂}(N)";
    printed.samples = w.nodes;
    printed.max_residual = w.printed_gap;
    printed.tol = env.t("functional");
    printed.status = printed.max_residual <= printed.tol ? Status::Pass : Status::Fail;
    Record derived = printed;
    derived.id = "surface.functional_derived";
    derived.anchor = "t₀ ∫_N f̂*Λ₂ = 𝓕_{Λ₂}(N)";
    derived.max_residual = w.derived_gap;
    derived.status = derived.max_residual <= derived.tol ? Status::Pass : Status::Fail;
    add_pair(rep, printed, derived);
  }
  rep.finalize();
  return rep;
}

VerificationReport run_command(const RunConfig& cfg) {
  if (cfg.command == "verify") return cmd_verify(cfg);
  if (cfg.command == "classify") return cmd_classify(cfg);
  if (cfg.command == "integrate") return cmd_integrate(cfg);
  if (cfg.command == "surface") return cmd_surface(cfg);
  throw ConfigError("unknown command '" + cfg.command + "'");
}

}  // namespace sbl
