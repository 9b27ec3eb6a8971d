#include "core/metric.hpp"

#include <cmath>

namespace beeid {

DecodingMetric DecodingMetric::ml(const ConditionalDistribution& channel) {
    DecodingMetric m;
    m.kind_ = Kind::ml;
    m.w_in_ = channel.in_size();
    m.w_out_ = channel.out_size();
    m.log_w_.resize(channel.flat().size());
    for (size_t i = 0; i < m.log_w_.size(); ++i) {
        m.log_w_[i] = channel.flat()[i] > 0.0 ? std::log(channel.flat()[i]) : -kInf;
    }
    return m;
}

DecodingMetric DecodingMetric::mmi() {
    DecodingMetric m;
    m.kind_ = Kind::mmi;
    return m;
}

DecodingMetric DecodingMetric::custom(std::function<double(const JointDistribution&)> fn) {
    DecodingMetric m;
    m.kind_ = Kind::custom;
    m.custom_ = std::move(fn);
    return m;
}

double DecodingMetric::operator()(const JointDistribution& joint_xy) const {
    switch (kind_) {
        case Kind::mmi:
            return mutual_information(joint_xy);
        case Kind::custom:
            return custom_(joint_xy);
        case Kind::ml: {
            if (joint_xy.dim(0) != w_in_ || joint_xy.dim(1) != w_out_) {
                throw std::invalid_argument("DecodingMetric: joint does not match channel");
            }
            double s = 0.0;
            for (int x = 0; x < w_in_; ++x) {
                for (int y = 0; y < w_out_; ++y) {
                    const double q = joint_xy.at(x, y);
                    if (q <= 0.0) continue;
                    const double lw = log_w_[static_cast<size_t>(x) * w_out_ + y];
                    if (lw == -kInf) return -kInf;
                    s += q * lw;
                }
            }
            return s;
        }
    }
    return 0.0;
}

}  // namespace beeid
