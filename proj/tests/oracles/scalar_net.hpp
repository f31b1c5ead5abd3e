#pragma once

// Allocation-free forward pass over plain arrays, independent of the
// library's Eigen path. Used by oracles that need millions of evaluations.

#include "pfaffnet/network.hpp"

#include <utility>
#include <vector>

namespace oracle {

class ScalarNet {
public:
    explicit ScalarNet(const pfaffnet::NetworkSpec& net) : act_(net.activation_ptr()), c0_(net.head_offset()) {
        const auto& arch = net.architecture();
        int prev = arch.d;
        for (int l = 1; l <= arch.depth(); ++l) {
            const int n = arch.width(l);
            Layer layer{n, prev, {}, {}};
            for (int k = 0; k < n; ++k) {
                for (int j = 0; j < prev; ++j)
                    layer.w.push_back(net.weight(l)(k, j));
                layer.b.push_back(net.bias(l)(k));
            }
            layers_.push_back(layer);
            prev = n;
        }
        for (int k = 0; k < prev; ++k)
            c_.push_back(net.head()(k));
    }

    double operator()(const double* x) const {
        double buf_a[64], buf_b[64];
        double* in = buf_a;
        double* out = buf_b;
        for (int j = 0; j < layers_.front().cols; ++j)
            in[j] = x[j];
        for (const auto& l : layers_) {
            for (int k = 0; k < l.rows; ++k) {
                double s = l.b[k];
                for (int j = 0; j < l.cols; ++j)
                    s += l.w[k * l.cols + j] * in[j];
                out[k] = (*act_)(s);
            }
            std::swap(in, out);
        }
        double F = c0_;
        for (std::size_t k = 0; k < c_.size(); ++k)
            F += c_[k] * in[k];
        return F;
    }

    double operator()(double x) const { return (*this)(&x); }

private:
    struct Layer {
        int rows, cols;
        std::vector<double> w, b;
    };
    pfaffnet::ActivationPtr act_;
    double c0_;
    std::vector<double> c_;
    std::vector<Layer> layers_;
};

} // namespace oracle
