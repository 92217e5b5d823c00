/*
 * Copyright 2026 The Blindspot Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "blindspot/accuracy.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "blindspot/errors.h"

namespace blindspot {
namespace {

void CheckProbability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw InvalidArgument(std::string(what) + " must be in [0,1], got " +
                          std::to_string(p));
  }
}

}  // namespace

double AccuracyCeiling(double blind_mass, double assumed_blind_accuracy) {
  CheckProbability(blind_mass, "blind mass");
  CheckProbability(assumed_blind_accuracy, "assumed blind accuracy");
  return (1.0 - blind_mass) + blind_mass * assumed_blind_accuracy;
}

double ChanceAccuracy(uint64_t num_classes) {
  if (num_classes == 0) throw InvalidArgument("number of classes must be >= 1");
  return 1.0 / static_cast<double>(num_classes);
}

CeilingCurve ComputeCeilingCurve(const BlindSpotCurve& curve,
                                 double assumed_blind_accuracy) {
  CheckProbability(assumed_blind_accuracy, "assumed blind accuracy");
  CeilingCurve out;
  out.assumed_blind_accuracy = assumed_blind_accuracy;
  out.points.reserve(curve.points.size());
  for (const auto& p : curve.points) {
    out.points.push_back(
        {p.tau, p.mass, AccuracyCeiling(p.mass, assumed_blind_accuracy)});
  }
  return out;
}

double MixtureResult::Recombined() const {
  double acc_total = 0.0;
  if (acc_sup) acc_total += (1.0 - blind_mass_empirical) * *acc_sup;
  if (acc_blind) acc_total += blind_mass_empirical * *acc_blind;
  return acc_total;
}

MixtureResult MixtureDecomposition(std::span<const Outcome> outcomes,
                                   const CountTable& table, uint64_t tau) {
  if (outcomes.empty()) throw InvalidArgument("no outcomes to decompose");
  if (tau == 0) throw InvalidArgument("support threshold tau must be at least 1");

  uint64_t correct_sup = 0, correct_blind = 0, n_sup = 0, n_blind = 0;
  for (size_t i = 0; i < outcomes.size(); ++i) {
    const auto& o = outcomes[i];
    if (!o.state.Conforms(table.schema())) {
      throw InvalidArgument("outcome " + std::to_string(i) +
                            " does not conform to the table schema");
    }
    if (table.count(o.state) >= tau) {
      ++n_sup;
      correct_sup += o.correct;
    } else {
      ++n_blind;
      correct_blind += o.correct;
    }
  }
  const double total = static_cast<double>(outcomes.size());
  MixtureResult r;
  r.acc = static_cast<double>(correct_sup + correct_blind) / total;
  r.blind_mass_empirical = static_cast<double>(n_blind) / total;
  r.supported_count = n_sup;
  r.blind_count = n_blind;
  if (n_sup > 0) {
    r.acc_sup = static_cast<double>(correct_sup) / static_cast<double>(n_sup);
  }
  if (n_blind > 0) {
    r.acc_blind =
        static_cast<double>(correct_blind) / static_cast<double>(n_blind);
  }
  return r;
}

double InverseNormalCdf(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw InvalidArgument("normal quantile requires p in (0,1)");
  }
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double kLow = 0.02425;

  double x;
  if (p < kLow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - kLow) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
        q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

  // Halley refinement against the exact CDF.
  const double e = 0.5 * std::erfc(-x / std::numbers::sqrt2) - p;
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(x * x / 2.0);
  return x - u / (1.0 + x * u / 2.0);
}

Interval WilsonInterval(uint64_t successes, uint64_t trials,
                        double confidence) {
  if (trials == 0) throw InvalidArgument("Wilson interval needs trials >= 1");
  if (successes > trials) {
    throw InvalidArgument("successes (" + std::to_string(successes) +
                          ") exceed trials (" + std::to_string(trials) + ")");
  }
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw InvalidArgument("confidence must be in (0,1)");
  }
  const double z = InverseNormalCdf(0.5 + confidence / 2.0);
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half =
      z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;

  Interval out{std::max(0.0, center - half), std::min(1.0, center + half)};
  if (successes == 0) out.lower = 0.0;
  if (successes == trials) out.upper = 1.0;
  out.lower = std::min(out.lower, p);
  out.upper = std::max(out.upper, p);
  return out;
}

}  // namespace blindspot
