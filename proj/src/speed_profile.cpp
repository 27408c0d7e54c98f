#include "scenepath/speed_profile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "scenepath/error.hpp"
#include "scenepath/rng.hpp"

namespace scenepath {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double envelope_vmax(double z, const EnvelopeParams& params) {
  if (!(z >= kMinHeadHeight - 1e-9 && z <= kMaxHeadHeight + 1e-9)) {
    throw Error(ErrorKind::Validation, "envelope_vmax",
                "head height " + std::to_string(z) + " outside [0.4, 1.47]");
  }
  const double v = ((params.z_full - z) * 1.0 + (z - params.z_min) * params.v_max) / (params.z_full - params.z_min);
  return std::min(v, params.v_max);
}

std::vector<double> point_speed_caps(const GeometricPath& path, const EnvelopeParams& params,
                                     const LocomotionType& locomotion, CapOptions options) {
  const auto& smp = path.samples;
  std::vector<double> caps(smp.size(), locomotion.speed_max);
  for (std::size_t i = 0; i < smp.size(); ++i) {
    double cap = locomotion.speed_max;
    if (options.apply_envelope) {
      cap = std::min(cap, envelope_vmax(std::clamp(smp[i].head_z, kMinHeadHeight, kMaxHeadHeight), params));
    }
    if (smp.size() >= 2) {
      const std::size_t lo = i == 0 ? 0 : i - 1;
      const std::size_t hi = std::min(i + 1, smp.size() - 1);
      const double ds = smp[hi].s - smp[lo].s;
      const double grade = ds > 0.0 ? (smp[hi].ground_z - smp[lo].ground_z) / ds : 0.0;
      cap /= 1.0 + params.k_slope_up * std::max(0.0, grade);
      cap /= 1.0 + params.k_slope_down * std::max(0.0, -grade);
    }
    if (smp[i].curvature > 0.0) cap = std::min(cap, std::sqrt(params.a_lat_max / smp[i].curvature));
    caps[i] = cap;
  }
  return caps;
}

SpeedProblem SpeedProblem::from_path(const GeometricPath& path, std::vector<double> caps, const EnvelopeParams& params,
                                     double v_start, std::optional<double> v_end) {
  SpeedProblem p;
  p.s.reserve(path.size());
  for (const PathSample& smp : path.samples) p.s.push_back(smp.s);
  p.caps = std::move(caps);
  p.a_max = params.a_max;
  p.a_min = params.a_min;
  p.v_start = v_start;
  p.v_end = v_end;
  return p;
}

void finalize_profile(SpeedProfile& profile) {
  const std::size_t n = profile.beta.size();
  profile.v.assign(n, 0.0);
  profile.t.assign(n, 0.0);
  profile.stalled_segments.clear();
  for (std::size_t i = 0; i < n; ++i) profile.v[i] = std::sqrt(std::max(profile.beta[i], 0.0));
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double vsum = profile.v[i] + profile.v[i + 1];
    const double ds = profile.s[i + 1] - profile.s[i];
    if (vsum > 0.0) {
      profile.t[i + 1] = profile.t[i] + 2.0 * ds / vsum;
    } else {
      profile.t[i + 1] = profile.t[i];
      if (ds > 0.0) profile.stalled_segments.push_back(i);
    }
  }
  profile.completion_time = n ? profile.t.back() : 0.0;
}

double profile_violation(const SpeedProblem& problem, const SpeedProfile& profile) {
  const auto& b = profile.beta;
  const std::size_t n = b.size();
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    worst = std::max(worst, -b[i]);
    if (std::isfinite(problem.caps[i])) worst = std::max(worst, b[i] - problem.caps[i] * problem.caps[i]);
  }
  if (n) {
    worst = std::max(worst, std::abs(b.front() - problem.v_start * problem.v_start));
    if (problem.v_end) worst = std::max(worst, std::abs(b.back() - *problem.v_end * *problem.v_end));
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double acc = (b[i + 1] - b[i]) / (2.0 * (problem.s[i + 1] - problem.s[i]));
    worst = std::max({worst, acc - problem.a_max, problem.a_min - acc});
  }
  return worst;
}

namespace {

void check_problem(const SpeedProblem& p) {
  if (p.s.size() != p.caps.size()) throw Error(ErrorKind::Validation, "speed_profile", "caps and samples differ in size");
  if (p.s.size() < 2) throw Error(ErrorKind::Validation, "speed_profile", "need at least two samples");
  for (std::size_t i = 0; i + 1 < p.s.size(); ++i) {
    if (!(p.s[i + 1] > p.s[i])) throw Error(ErrorKind::Validation, "speed_profile", "arc lengths must increase");
  }
  if (!(p.a_min < 0.0 && p.a_max > 0.0)) throw Error(ErrorKind::Validation, "speed_profile", "need a_min < 0 < a_max");
  if (p.v_start < 0.0 || (p.v_end && *p.v_end < 0.0)) {
    throw Error(ErrorKind::Validation, "speed_profile", "boundary speeds must be non-negative");
  }
}

// Exact reachable interval of beta at each sample, propagated forward.
// Throws naming the binding constraint when the problem has no solution.
void reachable_upper(const SpeedProblem& p, std::vector<double>& hi) {
  const std::size_t n = p.s.size();
  std::vector<double> lo(n);
  hi.assign(n, 0.0);
  const double b0 = p.v_start * p.v_start;
  const double cap0 = p.caps[0] * p.caps[0];
  if (b0 > cap0 * (1 + 1e-12) + 1e-12) {
    throw Error(ErrorKind::Infeasible, "speed_profile", "start speed exceeds the speed cap at s=0");
  }
  lo[0] = hi[0] = b0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double ds = p.s[i + 1] - p.s[i];
    const double cap = p.caps[i + 1] * p.caps[i + 1];
    lo[i + 1] = std::max(0.0, lo[i] + 2.0 * ds * p.a_min);
    hi[i + 1] = std::min(cap, hi[i] + 2.0 * ds * p.a_max);
    if (lo[i + 1] > hi[i + 1] * (1 + 1e-12) + 1e-12) {
      throw Error(ErrorKind::Infeasible, "speed_profile",
                  "speed cap at sample " + std::to_string(i + 1) + " (s=" + std::to_string(p.s[i + 1]) +
                      ") is below the slowest speed reachable when braking at a_min");
    }
  }
  if (p.v_end) {
    const double be = *p.v_end * *p.v_end;
    if (be < lo.back() * (1 - 1e-12) - 1e-12) {
      throw Error(ErrorKind::Infeasible, "speed_profile",
                  "end speed unreachable: braking at a_min cannot slow down within the path");
    }
    if (be > hi.back() * (1 + 1e-12) + 1e-12) {
      throw Error(ErrorKind::Infeasible, "speed_profile",
                  "end speed unreachable: exceeds the cap or what a_max allows within the path");
    }
  }
}

// Linear inequality with at most two variables: ca*x[a] + cb*x[b] <= h.
struct Row {
  int a = -1;
  double ca = 0.0;
  int b = -1;
  double cb = 0.0;
  double h = 0.0;
};

double row_value(const Row& r, const std::vector<double>& x) {
  double v = 0.0;
  if (r.a >= 0) v += r.ca * x[r.a];
  if (r.b >= 0) v += r.cb * x[r.b];
  return v;
}

// Solves the symmetric tridiagonal system (diag, off) y = rhs in place.
void solve_tridiagonal(std::vector<double> diag, std::vector<double> off, std::vector<double>& rhs) {
  const std::size_t n = diag.size();
  if (n == 0) return;
  for (std::size_t i = 1; i < n; ++i) {
    const double w = off[i - 1] / diag[i - 1];
    diag[i] -= w * off[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  rhs[n - 1] /= diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - off[i] * rhs[i + 1]) / diag[i];
}

struct Qp {
  std::vector<double> target;  // objective sum (target - x)^2
  std::vector<Row> rows;
};

double objective(const Qp& qp, const std::vector<double>& x) {
  double f = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) f += (qp.target[k] - x[k]) * (qp.target[k] - x[k]);
  return f;
}

double max_row_violation(const Qp& qp, const std::vector<double>& x) {
  double worst = 0.0;
  for (const Row& r : qp.rows) worst = std::max(worst, row_value(r, x) - r.h);
  return worst;
}

struct IpmResult {
  std::vector<double> x;
  std::vector<double> slack;
  std::vector<double> dual;
  int iterations = 0;
};

// Mehrotra predictor-corrector on min sum (t - x)^2 s.t. G x <= h.
IpmResult interior_point(const Qp& qp) {
  const std::size_t n = qp.target.size();
  const std::size_t m = qp.rows.size();
  IpmResult res;
  res.x.resize(n);
  for (std::size_t k = 0; k < n; ++k) res.x[k] = 0.5 * qp.target[k];
  res.slack.resize(m);
  res.dual.assign(m, 1.0);
  for (std::size_t j = 0; j < m; ++j) res.slack[j] = std::max(qp.rows[j].h - row_value(qp.rows[j], res.x), 1.0);
  if (m == 0) {
    res.x = qp.target;
    return res;
  }

  double h_scale = 1.0;
  for (const Row& r : qp.rows) h_scale = std::max(h_scale, std::abs(r.h));
  double c_scale = 1.0;
  for (double t : qp.target) c_scale = std::max(c_scale, 2.0 * std::abs(t));

  std::vector<double> rd(n), rp(m), rc(m), w(m), diag(n), off(n > 0 ? n - 1 : 0), dx(n), dl(m), ds(m);
  std::vector<double> dx_aff(n), dl_aff(m), ds_aff(m);
  auto& x = res.x;
  auto& s = res.slack;
  auto& lam = res.dual;

  auto solve_direction = [&](const std::vector<double>& rc_in, std::vector<double>& ox, std::vector<double>& ol,
                             std::vector<double>& os) {
    // (2I + G^T W G) dx = -rd - G^T (W rp - rc / s)
    std::fill(diag.begin(), diag.end(), 2.0);
    std::fill(off.begin(), off.end(), 0.0);
    for (std::size_t k = 0; k < n; ++k) ox[k] = -rd[k];
    for (std::size_t j = 0; j < m; ++j) {
      const Row& r = qp.rows[j];
      const double v = w[j] * rp[j] - rc_in[j] / s[j];
      if (r.a >= 0) {
        diag[r.a] += w[j] * r.ca * r.ca;
        ox[r.a] -= r.ca * v;
      }
      if (r.b >= 0) {
        diag[r.b] += w[j] * r.cb * r.cb;
        ox[r.b] -= r.cb * v;
      }
      if (r.a >= 0 && r.b >= 0) off[std::min(r.a, r.b)] += w[j] * r.ca * r.cb;
    }
    solve_tridiagonal(diag, off, ox);
    for (std::size_t j = 0; j < m; ++j) {
      const double gdx = row_value(qp.rows[j], ox);
      ol[j] = w[j] * (gdx + rp[j]) - rc_in[j] / s[j];
      os[j] = -(rc_in[j] + s[j] * ol[j]) / lam[j];
    }
  };

  auto max_step = [](const std::vector<double>& v, const std::vector<double>& dv) {
    double a = 1.0;
    for (std::size_t j = 0; j < v.size(); ++j) {
      if (dv[j] < 0.0) a = std::min(a, -v[j] / dv[j]);
    }
    return a;
  };

  for (int it = 0; it < 200; ++it) {
    res.iterations = it;
    for (std::size_t k = 0; k < n; ++k) rd[k] = 2.0 * (x[k] - qp.target[k]);
    for (std::size_t j = 0; j < m; ++j) {
      const Row& r = qp.rows[j];
      if (r.a >= 0) rd[r.a] += r.ca * lam[j];
      if (r.b >= 0) rd[r.b] += r.cb * lam[j];
      rp[j] = row_value(r, x) + s[j] - r.h;
    }
    const double mu = std::inner_product(s.begin(), s.end(), lam.begin(), 0.0) / static_cast<double>(m);
    double rd_max = 0.0;
    double rp_max = 0.0;
    for (double v : rd) rd_max = std::max(rd_max, std::abs(v));
    for (double v : rp) rp_max = std::max(rp_max, std::abs(v));
    if (rd_max <= 1e-12 * c_scale && rp_max <= 1e-12 * h_scale && mu <= 1e-15 * h_scale * c_scale) break;

    for (std::size_t j = 0; j < m; ++j) {
      w[j] = lam[j] / s[j];
      rc[j] = s[j] * lam[j];
    }
    solve_direction(rc, dx_aff, dl_aff, ds_aff);
    const double ap = max_step(s, ds_aff);
    const double ad = max_step(lam, dl_aff);
    double mu_aff = 0.0;
    for (std::size_t j = 0; j < m; ++j) mu_aff += (s[j] + ap * ds_aff[j]) * (lam[j] + ad * dl_aff[j]);
    mu_aff /= static_cast<double>(m);
    const double sigma = std::pow(mu_aff / mu, 3.0);
    for (std::size_t j = 0; j < m; ++j) rc[j] = s[j] * lam[j] + ds_aff[j] * dl_aff[j] - sigma * mu;
    solve_direction(rc, dx, dl, ds);
    const double alpha = std::min(1.0, 0.995 * std::min(max_step(s, ds), max_step(lam, dl)));
    for (std::size_t k = 0; k < n; ++k) x[k] += alpha * dx[k];
    for (std::size_t j = 0; j < m; ++j) {
      s[j] = std::max(s[j] + alpha * ds[j], 1e-300);
      lam[j] = std::max(lam[j] + alpha * dl[j], 1e-300);
    }
  }
  return res;
}

// Re-solves the QP with a guessed active set held as equalities. Each group of
// variables chained by active difference rows moves rigidly; a group is pinned
// by an active bound or else placed at its least-squares optimum. The guess
// starts from the interior point solution and is corrected for a few rounds:
// violated rows join it, and conflicting pins drop the weakest link between
// them. Returns nullopt if no consistent, feasible, no-worse point is found.
std::optional<std::vector<double>> polish(const Qp& qp, const IpmResult& ipm) {
  const std::size_t n = qp.target.size();
  const std::size_t m = qp.rows.size();
  std::vector<double> ratio(m);
  std::vector<char> active(m);
  for (std::size_t j = 0; j < m; ++j) {
    ratio[j] = ipm.slack[j] / ipm.dual[j];
    active[j] = ipm.slack[j] < ipm.dual[j];
    const Row& r = qp.rows[j];
    if (r.a >= 0 && r.b >= 0 && r.ca != -r.cb) return std::nullopt;
  }
  const double f_ipm = objective(qp, ipm.x);

  struct Link {
    int to;
    double offset;  // x[to] = x[from] + offset
    std::size_t row;
  };
  for (int round = 0; round < 8; ++round) {
    std::vector<std::vector<Link>> links(n);
    std::vector<int> pin_row(n, -1);
    for (std::size_t j = 0; j < m; ++j) {
      if (!active[j]) continue;
      const Row& r = qp.rows[j];
      if (r.a >= 0 && r.b >= 0) {
        links[r.a].push_back({r.b, r.h / r.cb, j});
        links[r.b].push_back({r.a, -r.h / r.cb, j});
      } else {
        // both ends of a very narrow box can look active; keep the tighter one
        const int v = r.a >= 0 ? r.a : r.b;
        if (pin_row[v] < 0 || ratio[j] < ratio[pin_row[v]]) pin_row[v] = static_cast<int>(j);
      }
    }
    auto pin_value = [&](int v) {
      const Row& r = qp.rows[pin_row[v]];
      return r.h / (r.a >= 0 ? r.ca : r.cb);
    };

    std::vector<double> x(n, 0.0), offset(n, 0.0);
    std::vector<int> via(n, -1);  // row of the link a variable was reached through
    std::vector<int> from(n, -1);
    std::vector<char> seen(n, 0);
    std::optional<std::size_t> drop;
    for (std::size_t root = 0; root < n && !drop; ++root) {
      if (seen[root]) continue;
      std::vector<int> group{static_cast<int>(root)};
      seen[root] = 1;
      for (std::size_t q = 0; q < group.size(); ++q) {
        const int u = group[q];
        for (const Link& l : links[u]) {
          if (seen[l.to]) continue;
          seen[l.to] = 1;
          offset[l.to] = offset[u] + l.offset;
          via[l.to] = static_cast<int>(l.row);
          from[l.to] = u;
          group.push_back(l.to);
        }
      }
      // a closed loop of links must agree with itself
      for (int u : group) {
        for (const Link& l : links[u]) {
          if (std::abs(offset[l.to] - offset[u] - l.offset) > 1e-9 * (1.0 + std::abs(offset[l.to]))) {
            return std::nullopt;
          }
        }
      }
      std::optional<double> base;
      int base_var = -1;
      for (int u : group) {
        if (pin_row[u] < 0) continue;
        const double cand = pin_value(u) - offset[u];
        if (!base) {
          base = cand;
          base_var = u;
        } else if (std::abs(*base - cand) > 1e-12 * (1.0 + std::abs(cand))) {
          // weakest link on the tree path between the two pinned variables
          std::vector<int> up_a, up_b;
          for (int v = base_var; v >= 0; v = from[v]) up_a.push_back(v);
          for (int v = u; v >= 0; v = from[v]) up_b.push_back(v);
          while (!up_a.empty() && !up_b.empty() && up_a.back() == up_b.back()) {
            up_a.pop_back();
            up_b.pop_back();
          }
          double worst = -1.0;
          for (const auto* path : {&up_a, &up_b}) {
            for (int v : *path) {
              if (ratio[via[v]] > worst) {
                worst = ratio[via[v]];
                drop = static_cast<std::size_t>(via[v]);
              }
            }
          }
          break;
        }
      }
      if (drop) break;
      if (!base) {
        double sum = 0.0;
        for (int u : group) sum += qp.target[u] - offset[u];
        base = sum / static_cast<double>(group.size());
      }
      for (int u : group) x[u] = *base + offset[u];
    }
    if (drop) {
      active[*drop] = 0;
      continue;
    }
    bool violated = false;
    for (std::size_t j = 0; j < m; ++j) {
      if (row_value(qp.rows[j], x) - qp.rows[j].h > 1e-11) {
        active[j] = 1;
        ratio[j] = -1.0;  // observed binding: trust it over the interior point guess
        violated = true;
      }
    }
    if (violated) continue;
    if (objective(qp, x) > f_ipm + 1e-10 * (1.0 + std::abs(f_ipm))) return std::nullopt;
    return x;
  }
  return std::nullopt;
}

// Moves each variable still below its target up as far as the rows allow.
// Only ever lowers the objective; cleans up bounds picked wrongly in boxes
// narrower than the solver tolerance.
void raise_toward_target(const Qp& qp, std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<std::vector<std::size_t>> rows_of(n);
  for (std::size_t j = 0; j < qp.rows.size(); ++j) {
    const Row& r = qp.rows[j];
    if (r.a >= 0 && r.ca > 0.0) rows_of[r.a].push_back(j);
    if (r.b >= 0 && r.cb > 0.0) rows_of[r.b].push_back(j);
  }
  auto visit = [&](std::size_t k) {
    if (x[k] >= qp.target[k]) return;
    double up = qp.target[k];
    for (std::size_t j : rows_of[k]) {
      const Row& r = qp.rows[j];
      const bool is_a = r.a == static_cast<int>(k);
      const double c = is_a ? r.ca : r.cb;
      double other = 0.0;
      if (is_a && r.b >= 0) other = r.cb * x[r.b];
      if (!is_a && r.a >= 0) other = r.ca * x[r.a];
      up = std::min(up, (r.h - other) / c);
    }
    if (up > x[k]) x[k] = up;
  };
  for (std::size_t k = 0; k < n; ++k) visit(k);
  for (std::size_t k = n; k-- > 0;) visit(k);
}

}  // namespace

SpeedProfile solve_min_time_qp(const SpeedProblem& p) {
  check_problem(p);
  const std::size_t n = p.s.size();
  std::vector<double> hi;
  reachable_upper(p, hi);

  // Samples whose value is pinned (boundaries, zero caps) leave the problem.
  std::vector<double> beta(n, 0.0);
  std::vector<int> var(n, -1);
  std::vector<std::size_t> free_samples;
  std::vector<char> fixed(n, 0);
  fixed[0] = 1;
  beta[0] = p.v_start * p.v_start;
  if (p.v_end) {
    fixed[n - 1] = 1;
    beta[n - 1] = *p.v_end * *p.v_end;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (fixed[i]) continue;
    if (hi[i] <= 1e-14) {
      fixed[i] = 1;
      beta[i] = std::max(hi[i], 0.0);
      continue;
    }
    var[i] = static_cast<int>(free_samples.size());
    free_samples.push_back(i);
  }

  Qp qp;
  qp.target.resize(free_samples.size());
  for (std::size_t k = 0; k < free_samples.size(); ++k) {
    const std::size_t i = free_samples[k];
    qp.target[k] = hi[i];
    qp.rows.push_back({static_cast<int>(k), 1.0, -1, 0.0, hi[i]});
    qp.rows.push_back({static_cast<int>(k), -1.0, -1, 0.0, 0.0});
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double ds = p.s[i + 1] - p.s[i];
    const double up = 2.0 * ds * p.a_max;
    const double down = 2.0 * ds * p.a_min;
    const int a = var[i];
    const int b = var[i + 1];
    if (a < 0 && b < 0) continue;
    // beta[i+1] - beta[i] <= up  and  beta[i] - beta[i+1] <= -down
    if (a >= 0 && b >= 0) {
      qp.rows.push_back({a, -1.0, b, 1.0, up});
      qp.rows.push_back({a, 1.0, b, -1.0, -down});
    } else if (a >= 0) {
      qp.rows.push_back({a, -1.0, -1, 0.0, up - beta[i + 1]});
      qp.rows.push_back({a, 1.0, -1, 0.0, -down + beta[i + 1]});
    } else {
      qp.rows.push_back({b, 1.0, -1, 0.0, up + beta[i]});
      qp.rows.push_back({b, -1.0, -1, 0.0, -down - beta[i]});
    }
  }

  SpeedProfile out;
  out.s = p.s;
  if (!free_samples.empty()) {
    const IpmResult ipm = interior_point(qp);
    out.diagnostics.iterations = ipm.iterations;
    std::vector<double> x = ipm.x;
    if (auto polished = polish(qp, ipm)) {
      x = std::move(*polished);
      out.diagnostics.polished = true;
    }
    raise_toward_target(qp, x);
    for (std::size_t k = 0; k < free_samples.size(); ++k) beta[free_samples[k]] = std::clamp(x[k], 0.0, hi[free_samples[k]]);
  }
  out.beta = std::move(beta);
  finalize_profile(out);
  out.diagnostics.max_violation = profile_violation(p, out);
  return out;
}

SpeedProfile forward_backward_oracle(const SpeedProblem& p) {
  check_problem(p);
  const std::size_t n = p.s.size();
  SpeedProfile out;
  out.s = p.s;
  auto& b = out.beta;
  b.assign(n, 0.0);
  const double b0 = p.v_start * p.v_start;
  if (b0 > p.caps[0] * p.caps[0] * (1 + 1e-12) + 1e-12) {
    throw Error(ErrorKind::Infeasible, "forward_backward", "start speed exceeds the speed cap at s=0");
  }
  b[0] = b0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    b[i + 1] = std::min(p.caps[i + 1] * p.caps[i + 1], b[i] + 2.0 * p.a_max * (p.s[i + 1] - p.s[i]));
  }
  if (p.v_end) {
    const double be = *p.v_end * *p.v_end;
    if (be > b[n - 1] * (1 + 1e-12) + 1e-12) {
      throw Error(ErrorKind::Infeasible, "forward_backward", "end speed exceeds what acceleration allows");
    }
    b[n - 1] = be;
  }
  for (std::size_t i = n - 1; i-- > 0;) {
    b[i] = std::min(b[i], b[i + 1] + 2.0 * -p.a_min * (p.s[i + 1] - p.s[i]));
  }
  if (b[0] < b0 * (1 - 1e-12) - 1e-12) {
    throw Error(ErrorKind::Infeasible, "forward_backward", "cannot brake at a_min to satisfy downstream caps");
  }
  b[0] = b0;
  finalize_profile(out);
  out.diagnostics.max_violation = profile_violation(p, out);
  return out;
}

double max_feasible_start_speed(const SpeedProblem& p) {
  const std::size_t n = p.s.size();
  if (n == 0) return 0.0;
  double b = p.v_end ? *p.v_end * *p.v_end : p.caps[n - 1] * p.caps[n - 1];
  b = std::min(b, p.caps[n - 1] * p.caps[n - 1]);
  for (std::size_t i = n - 1; i-- > 0;) {
    b = std::min(p.caps[i] * p.caps[i], b + 2.0 * -p.a_min * (p.s[i + 1] - p.s[i]));
  }
  return std::sqrt(std::max(b, 0.0));
}

SpeedProfile constant_speed_profile(const GeometricPath& path, double speed) {
  SpeedProfile out;
  for (const PathSample& smp : path.samples) out.s.push_back(smp.s);
  out.beta.assign(out.s.size(), speed * speed);
  finalize_profile(out);
  return out;
}

double arc_length_at(const SpeedProfile& profile, double t) {
  const auto& ts = profile.t;
  const std::size_t n = ts.size();
  if (n == 0) return 0.0;
  if (t <= 0.0) return profile.s.front();
  if (t >= ts.back()) return profile.s.back();
  const auto it = std::upper_bound(ts.begin(), ts.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - ts.begin()) - 1;
  const double ds = profile.s[i + 1] - profile.s[i];
  const double acc = (profile.beta[i + 1] - profile.beta[i]) / (2.0 * ds);
  const double tau = t - ts[i];
  const double s = profile.s[i] + profile.v[i] * tau + 0.5 * acc * tau * tau;
  return std::clamp(s, profile.s[i], profile.s[i + 1]);
}

namespace {

double speed_at_arc(const SpeedProfile& profile, double s) {
  const auto& ss = profile.s;
  if (s <= ss.front()) return profile.v.front();
  if (s >= ss.back()) return profile.v.back();
  const auto it = std::upper_bound(ss.begin(), ss.end(), s);
  const std::size_t i = static_cast<std::size_t>(it - ss.begin()) - 1;
  const double f = (s - ss[i]) / (ss[i + 1] - ss[i]);
  return std::sqrt(std::max(0.0, profile.beta[i] + f * (profile.beta[i + 1] - profile.beta[i])));
}

}  // namespace

Waypoint Trajectory::sample(double t) const {
  if (waypoints.empty()) return {};
  if (t <= waypoints.front().t) return waypoints.front();
  if (t >= waypoints.back().t) return waypoints.back();
  const double idx = (t - waypoints.front().t) * rate;
  std::size_t i = std::min(static_cast<std::size_t>(idx), waypoints.size() - 2);
  while (i + 1 < waypoints.size() - 1 && waypoints[i + 1].t <= t) ++i;
  while (i > 0 && waypoints[i].t > t) --i;
  const Waypoint& a = waypoints[i];
  const Waypoint& b = waypoints[i + 1];
  const double f = b.t > a.t ? (t - a.t) / (b.t - a.t) : 0.0;
  Waypoint w;
  w.t = t;
  w.s = a.s + f * (b.s - a.s);
  w.position = a.position + (b.position - a.position) * f;
  w.z = a.z + f * (b.z - a.z);
  w.head_z = a.head_z + f * (b.head_z - a.head_z);
  w.v = a.v + f * (b.v - a.v);
  return w;
}

Trajectory to_trajectory(const GeometricPath& path, const SpeedProfile& profile, double rate) {
  if (!(rate > 0.0)) throw Error(ErrorKind::Validation, "to_trajectory", "rate must be > 0");
  if (!profile.stalled_segments.empty()) {
    const double s = profile.s[profile.stalled_segments.front()];
    throw Error(ErrorKind::Stuck, "to_trajectory", "zero-speed segment at s=" + std::to_string(s));
  }
  Trajectory traj;
  traj.rate = rate;
  const double total = profile.completion_time;
  const auto count = static_cast<std::size_t>(std::ceil(total * rate - 1e-9)) + 1;
  traj.waypoints.reserve(count);
  auto make = [&](double t, double s) {
    Waypoint w;
    w.t = t;
    w.s = s;
    w.position = path.position_at(s);
    w.head_z = path.head_z_at(s);
    w.z = path.ground_z_at(s) + w.head_z;
    w.v = speed_at_arc(profile, s);
    return w;
  };
  for (std::size_t k = 0; k + 1 < count; ++k) {
    const double t = static_cast<double>(k) / rate;
    traj.waypoints.push_back(make(t, arc_length_at(profile, t)));
  }
  traj.waypoints.push_back(make(static_cast<double>(count - 1) / rate, path.length()));
  return traj;
}

TrainingSample sample_training_path(std::uint64_t seed, const TrainingPathParams& params) {
  Rng rng(seed);
  TrainingSample out;
  GeometricPath& path = out.path;
  path.spacing = params.spacing;
  path.locomotion = locomotion(Gait::Walk);
  const auto n = static_cast<std::size_t>(std::floor(params.length / params.spacing)) + 1;
  constexpr double kCanonical[] = {0.4, 0.8, 1.47};

  auto draw_height = [&] {
    if (rng.uniform() < 0.5) return kCanonical[rng.below(3)];
    return rng.uniform(kMinHeadHeight, kMaxHeadHeight);
  };

  Vec2 pos{};
  double heading = rng.uniform(-std::numbers::pi, std::numbers::pi);
  double turn = 0.0;
  double height = draw_height();
  double target = height;
  double next_knot = params.knot_spacing;
  for (std::size_t i = 0; i < n; ++i) {
    const double s = static_cast<double>(i) * params.spacing;
    if (s >= next_knot) {
      target = draw_height();
      next_knot += params.knot_spacing;
    }
    if (i > 0) {
      const double step = params.max_height_rate * params.spacing;
      height += std::clamp(target - height, -step, step);
      height = std::clamp(height, kMinHeadHeight, kMaxHeadHeight);
      turn = std::clamp(turn + rng.uniform(-0.05, 0.05), -params.max_turn_rate, params.max_turn_rate);
      heading += turn * params.spacing;
      pos += Vec2{std::cos(heading), std::sin(heading)} * params.spacing;
    }
    PathSample smp;
    smp.position = pos;
    smp.s = s;
    smp.head_z = height;
    path.samples.push_back(smp);
  }
  compute_curvature(path);

  SpeedProfile& prof = out.profile;
  for (const PathSample& smp : path.samples) {
    const double v = rng.uniform(0.0, envelope_vmax(smp.head_z, params.envelope));
    prof.s.push_back(smp.s);
    prof.beta.push_back(v * v);
  }
  finalize_profile(prof);
  return out;
}

}  // namespace scenepath
