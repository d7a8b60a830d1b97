#pragma once

// Pre-registered statistical thresholds for the acceptance battery.
//
// The distributional cutoffs below were frozen from one calibration run at
// ten times the battery's trial budget, before the battery was wired up.
// Reproduce with:
//
//   chaoslab clt --n-list 4,16,64,256 --trials 1000000 --seed 20260810
//   chaoslab clt --family negative-control --n-list 4,16,64,256 \
//       --trials 1000000 --seed 20260810
//
// Calibration log (seed 20260810, 10^6 trials):
//   n=4    E F^4 = 16.355561  (se 0.642099)   ks = 0.216967
//   n=16   E F^4 =  6.248567  (se 0.085810)   ks = 0.125857
//   n=64   E F^4 =  3.753109  (se 0.023222)   ks = 0.068115
//   n=256  E F^4 =  3.211972  (se 0.013214)   ks = 0.035085
//   negative control (fixed two-cell kernel): ks = 0.305365
//
// Rules used to fix the constants:
//   ks threshold at n=256   = 0.035085 + sqrt(ln(2/1e-6) / (2e5))  ~ DKW radius
//                           = 0.035085 + 0.008517
//   fourth-moment tolerance = |3.211972 - 3| + 4 * 0.013214 * sqrt(10)
//                             (the battery runs at 1e5 trials, so the
//                              calibrated standard error scales by sqrt(10))
//   plateau floor           = half the calibrated control value
//   plateau range           = about twice the 1e5-trial DKW radius

namespace chaoslab::calibration {

inline constexpr double kKs256Threshold = 0.0436;
inline constexpr double kFourthMomentTol256 = 0.3791;
inline constexpr double kNegativeControlFloor = 0.15;
inline constexpr double kNegativeControlRange = 0.02;

}  // namespace chaoslab::calibration
