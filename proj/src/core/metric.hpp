#pragma once

#include <functional>
#include <memory>

#include "core/distribution.hpp"
#include "core/info.hpp"

namespace beeid {

/// Continuous functional g of a joint empirical distribution over (X, Y).
/// The ML form returns -inf exactly when the joint puts mass on a zero of W.
class DecodingMetric {
public:
    enum class Kind { ml, mmi, custom };

    static DecodingMetric ml(const ConditionalDistribution& channel);
    static DecodingMetric mmi();
    static DecodingMetric custom(std::function<double(const JointDistribution&)> fn);

    Kind kind() const { return kind_; }
    double operator()(const JointDistribution& joint_xy) const;

    /// ML only: log W table (row-major), -inf at zeros. Used by hot loops.
    const std::vector<double>& log_channel() const { return log_w_; }
    int channel_in_size() const { return w_in_; }
    int channel_out_size() const { return w_out_; }

private:
    Kind kind_ = Kind::mmi;
    int w_in_ = 0, w_out_ = 0;
    std::vector<double> log_w_;
    std::function<double(const JointDistribution&)> custom_;
};

}  // namespace beeid
