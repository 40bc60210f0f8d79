#include "mdp/verify.hpp"

#include <cmath>
#include <ostream>

#include "mdp/csv.hpp"
#include "mdp/error.hpp"

namespace mdp {

namespace {

const std::vector<double> kHatCoefficients{0.5, -1.0, 2.0, 1.5, -0.25};

}  // namespace

NoiseModel finite_law(const std::string& name) {
  if (name == "rademacher") return NoiseModel::rademacher();
  if (name == "three-point") return NoiseModel::three_point();
  throw ConfigError("unknown finite-support law '" + name + "'");
}

VerifyReport verify_moments(const SweepSpec& spec, const ClosedFormFn& closed) {
  VerifyReport report;
  auto check = [&](const std::string& law, const NoiseModel& model, const MomentQuery& q, const char* kind,
                   double value, bool finding_only) {
    VerifyRow row{law, q.window.theta, q.window.m_max, q.window.m, kind, q.window.l, q.window.q, q.gap,
                  value, 0.0, 0.0, ""};
    try {
      row.oracle = brute_force_moment(q, model, spec.workers);
      row.diff = std::abs(row.closed - row.oracle);
      if (row.diff <= spec.tolerance) {
        row.status = "pass";
      } else if (finding_only) {
        row.status = "finding";
        ++report.findings;
      } else {
        row.status = "fail";
        ++report.failures;
      }
    } catch (const EnumerationGuardError&) {
      row.oracle = NAN;
      row.diff = NAN;
      row.status = "skipped";
      ++report.skipped;
    }
    report.rows.push_back(row);
  };

  if (spec.m_span < 1) throw ConfigError("moment sweep needs m_span >= 1");
  for (const auto& law : spec.laws) {
    const NoiseModel model = finite_law(law);
    for (double theta : spec.thetas)
      for (int mm : spec.m_max_values)
        for (int m = 2 * mm + 1; m <= 2 * mm + spec.m_span; ++m) {
          const std::vector<double> a(kHatCoefficients.begin(), kHatCoefficients.begin() + mm + 1);
          auto window = [&](int l, int q) { return UWindow::make(mm, m, theta, model, l, q, a); };
          for (int l = 0; l <= mm; ++l) {
            const MomentQuery mean{MomentKind::mean, 0, window(l, l)};
            check(law, model, mean, "mean", closed(mean), false);
            const MomentQuery var{MomentKind::variance, 0, window(l, l)};
            check(law, model, var, "variance", closed(var), false);
            for (int g = 1; g <= m + l; ++g) {
              const MomentQuery sl{MomentKind::same_lag_cross, g, window(l, l)};
              check(law, model, sl, "same_lag_cross", closed(sl), false);
            }
            for (int q = 0; q <= mm; ++q)
              for (int g = 0; g <= m + mm; ++g) {
                const MomentQuery mx{MomentKind::mixed_cross, g, window(l, q)};
                check(law, model, mx, "mixed_cross", closed(mx), false);
              }
            const MomentQuery bv{MomentKind::block_variance, 0, window(l, l)};
            check(law, model, bv, "block_variance", closed(bv), false);
            check(law, model, bv, "block_variance_displayed", block_variance_displayed(l, bv.window), true);
          }
          const MomentQuery hv{MomentKind::hat_variance, 0, window(0, 0)};
          check(law, model, hv, "hat_variance", closed(hv), false);
          for (int g = 1; g <= m + mm; ++g) {
            const MomentQuery hc{MomentKind::hat_cross, g, window(0, 0)};
            check(law, model, hc, "hat_cross", closed(hc), false);
          }
          const MomentQuery hb{MomentKind::hat_block_variance, 0, window(0, 0)};
          check(law, model, hb, "hat_block_variance", closed(hb), false);
        }
  }
  return report;
}

void write_verify_csv(std::ostream& os, const VerifyReport& report) {
  os << "law,theta,m_max,m,kind,l,q,gap,closed_form,oracle,abs_diff,status\n";
  for (const auto& r : report.rows)
    csv::row(os, {r.law, csv::num(r.theta), csv::num(r.m_max), csv::num(r.m), r.kind, csv::num(r.l), csv::num(r.q),
                  csv::num(r.gap), csv::num(r.closed), csv::num(r.oracle), csv::num(r.diff), r.status});
}

}  // namespace mdp
