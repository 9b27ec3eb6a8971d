#pragma once

#include <cstdint>
#include <limits>
#include <span>

#include "core/distribution.hpp"

namespace beeid {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline double clip_pos(double t) { return t > 0.0 ? t : 0.0; }

/// I_Q(X;Y) in nats, 0*log0 cells contribute zero. Clamped at 0 against rounding.
double mutual_information(const JointDistribution& q);

/// Which variable of a 3-way joint (X, X', Y) acts as the conditioner.
enum class ConditionOn { first, second, third };

/// Conditional mutual information of the two free axes given the conditioner, nats.
double conditional_mutual_information(const JointDistribution& q, ConditionOn pattern);

/// D(Q_{Y|X} || W | Q_X); +inf when q_cond puts mass on a zero of w under positive q_x.
double weighted_divergence(const ConditionalDistribution& q_cond,
                           const ConditionalDistribution& w, const Distribution& q_x);

/// Joint empirical distribution of a pair of equal-length sequences.
JointDistribution empirical_joint(std::span<const int> x_seq, std::span<const int> y_seq,
                                  int x_alphabet, int y_alphabet);

/// True iff all rows are permutations of each other and all columns likewise.
bool is_symmetric(const ConditionalDistribution& w);

/// Natural-log binary entropy of a probability vector (finite alphabets).
double entropy(const Distribution& p);

inline constexpr double kLn2 = 0.6931471805599453094172321214581766;
inline double nats_to_bits(double v) { return v / kLn2; }
inline double bits_to_nats(double v) { return v * kLn2; }

}  // namespace beeid
