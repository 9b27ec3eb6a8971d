#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace beeid {

inline constexpr double kProbabilitySumTol = 1e-12;

/// Probability vector over a finite alphabet {0, ..., size-1}.
class Distribution {
public:
    explicit Distribution(std::vector<double> probs);

    static Distribution uniform(int alphabet_size);
    static Distribution point_mass(int alphabet_size, int at);

    int size() const { return static_cast<int>(probs_.size()); }
    double operator[](int i) const { return probs_[i]; }
    const std::vector<double>& probs() const { return probs_; }

    bool operator==(const Distribution&) const = default;

private:
    std::vector<double> probs_;
};

/// Row-stochastic matrix: row x is a distribution over the output alphabet.
/// Houses channels W and conditional types Q_{Y|X}, Q_{X'|X}, Q_{Xt|Y}.
class ConditionalDistribution {
public:
    ConditionalDistribution(int in_size, int out_size, std::vector<double> rows);

    static ConditionalDistribution bsc(double p);
    static ConditionalDistribution identity(int size);

    int in_size() const { return in_; }
    int out_size() const { return out_; }
    double operator()(int x, int y) const { return rows_[static_cast<size_t>(x) * out_ + y]; }
    std::span<const double> row(int x) const {
        return {rows_.data() + static_cast<size_t>(x) * out_, static_cast<size_t>(out_)};
    }
    const std::vector<double>& flat() const { return rows_; }

    Distribution row_distribution(int x) const;

    bool operator==(const ConditionalDistribution&) const = default;

private:
    int in_ = 0;
    int out_ = 0;
    std::vector<double> rows_;  // row-major in_ x out_
};

/// Dense nonnegative joint over two or three finite alphabets, normalized to 1.
class JointDistribution {
public:
    JointDistribution(int nx, int ny, std::vector<double> table);          // (X, Y)
    JointDistribution(int nx, int nxp, int ny, std::vector<double> table); // (X, X', Y)

    int axes() const { return static_cast<int>(dims_.size()); }
    int dim(int axis) const { return dims_[axis]; }
    double at(int i, int j) const { return table_[static_cast<size_t>(i) * dims_[1] + j]; }
    double at(int i, int j, int k) const {
        return table_[(static_cast<size_t>(i) * dims_[1] + j) * dims_[2] + k];
    }
    const std::vector<double>& flat() const { return table_; }

    /// Sums out all axes except `axis`.
    Distribution marginal(int axis) const;
    /// 3-way joints only: joint of the two axes other than `axis`, axis order preserved.
    JointDistribution pair_marginal(int dropped_axis) const;

    static JointDistribution product(const Distribution& px, const Distribution& py);
    /// Couples q_x with rows of a conditional: table(x,y) = q_x(x) * cond(y|x).
    static JointDistribution couple(const Distribution& q_x, const ConditionalDistribution& cond);

private:
    void validate() const;
    std::vector<int> dims_;
    std::vector<double> table_;
};

/// Integer symbol counts summing exactly to the block length n.
struct Composition {
    std::vector<int> counts;
    int n = 0;

    Composition(std::vector<int> c, int block_length);
    int alphabet_size() const { return static_cast<int>(counts.size()); }
    Distribution to_distribution() const;
};

/// Largest-remainder quantization of n*q_x, ties broken by lowest symbol index.
Composition quantize_composition(const Distribution& q_x, int n);

}  // namespace beeid
