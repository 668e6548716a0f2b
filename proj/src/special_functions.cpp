/*
 * Copyright (c) 2026 the pegamp authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include "pegamp/special_functions.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace pegamp {

namespace {

// Rational Chebyshev fits for erf/erfc/erfcx from
//
//   W. J. Cody, "Rational Chebyshev approximations for the error function",
//   Math. Comp. 23 (1969), 631-637 (the SPECFUN coefficient set),
//
// good to ~18 significant digits in each regime.
constexpr double kErfA[5] = {3.1611237438705656, 113.864154151050156,
                             377.485237685302021, 3209.37758913846947,
                             0.185777706184603153};
constexpr double kErfB[4] = {23.6012909523441209, 244.024637934444173,
                             1282.61652607737228, 2844.23683343917062};
constexpr double kErfcC[9] = {0.564188496988670089, 8.88314979438837594,
                              66.1191906371416295,  298.635138197400131,
                              881.95222124176909,   1712.04761263407058,
                              2051.07837782607147,  1230.33935479799725,
                              2.15311535474403846e-8};
constexpr double kErfcD[8] = {15.7449261107098347, 117.693950891312499,
                              537.181101862009858, 1621.38957456669019,
                              3290.79923573345963, 4362.61909014324716,
                              3439.36767414372164, 1230.33935480374942};
constexpr double kTailP[6] = {0.305326634961232344, 0.360344899949804439,
                              0.125781726111229246, 0.0160837851487422766,
                              6.58749161529837803e-4, 0.0163153871373020978};
constexpr double kTailQ[5] = {2.56852019228982242, 1.87295284992346047,
                              0.527905102951428412, 0.0605183413124413191,
                              0.00233520497626869185};

constexpr double kOneOverSqrtPi = 0.56418958354775628695;
constexpr double kLog2 = 0.69314718055994530942;

// Largest negative argument before exp(x^2)*erfc(x) exceeds DBL_MAX.
constexpr double kErfcxNegLimit = -26.628;

// exp(x^2) evaluated as exp(hi^2)*exp((x-hi)(x+hi)) with hi = trunc(16x)/16,
// which keeps the squared term exactly representable (Cody's trick).
inline double exp_sq(double x) {
    const double hi = std::trunc(x * 16.0) / 16.0;
    const double del = (x - hi) * (x + hi);
    return std::exp(hi * hi) * std::exp(del);
}

}  // namespace

double erfcx(double x) {
    const double y = std::fabs(x);

    if (y <= 0.46875) {
        // Central regime: erfcx = exp(x^2) * (1 - erf(x)).
        const double ysq = (y > 1.11e-16) ? y * y : 0.0;
        double num = kErfA[4] * ysq;
        double den = ysq;
        for (int i = 0; i < 3; ++i) {
            num = (num + kErfA[i]) * ysq;
            den = (den + kErfB[i]) * ysq;
        }
        const double erf_val = x * (num + kErfA[3]) / (den + kErfB[3]);
        return std::exp(ysq) * (1.0 - erf_val);
    }

    double result;
    if (y <= 4.0) {
        double num = kErfcC[8] * y;
        double den = y;
        for (int i = 0; i < 7; ++i) {
            num = (num + kErfcC[i]) * y;
            den = (den + kErfcD[i]) * y;
        }
        result = (num + kErfcC[7]) / (den + kErfcD[7]);
    } else if (y >= 2.53e307) {
        result = 0.0;  // 1/(y*sqrt(pi)) underflows
    } else if (y >= 6.71e7) {
        result = kOneOverSqrtPi / y;
    } else {
        const double ysq = 1.0 / (y * y);
        double num = kTailP[5] * ysq;
        double den = ysq;
        for (int i = 0; i < 4; ++i) {
            num = (num + kTailP[i]) * ysq;
            den = (den + kTailQ[i]) * ysq;
        }
        result = ysq * (num + kTailP[4]) / (den + kTailQ[4]);
        result = (kOneOverSqrtPi - result) / y;
    }

    if (x < 0.0) {
        if (x < kErfcxNegLimit) {
            return std::numeric_limits<double>::infinity();
        }
        // erfcx(-y) = 2 exp(y^2) - erfcx(y)
        const double twoexp = exp_sq(x);
        result = (twoexp + twoexp) - result;
    }
    return result;
}

double log_erfcx(double x) {
    if (x <= -26.0) {
        // erfcx(x) = exp(x^2) * (2 - erfc(-x)); erfc(26) < 1e-295.
        return x * x + kLog2;
    }
    return std::log(erfcx(x));
}

double log_sum_exp(std::span<const double> values) {
    if (values.empty()) {
        throw std::invalid_argument("empty reduction");
    }
    double m = -std::numeric_limits<double>::infinity();
    for (double v : values) {
        if (v > m) m = v;
    }
    if (m == -std::numeric_limits<double>::infinity()) {
        return m;  // every input is -inf
    }
    double sum = 0.0;
    for (double v : values) {
        sum += std::exp(v - m);
    }
    return m + std::log(sum);
}

double log_sum_exp(std::initializer_list<double> values) {
    return log_sum_exp(std::span<const double>(values.begin(), values.size()));
}

double gauss_log_pdf(double x, double mean, double variance) {
    if (!(variance > 0.0)) {
        throw std::invalid_argument("nonpositive variance");
    }
    constexpr double kLog2Pi = 1.8378770664093454836;
    const double d = x - mean;
    return -0.5 * (kLog2Pi + std::log(variance)) - d * d / (2.0 * variance);
}

}  // namespace pegamp
