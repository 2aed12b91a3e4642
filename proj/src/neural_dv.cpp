#include <algorithm>
#include <cmath>
#include <limits>

#include "edibench/estimators.hpp"
#include "edibench/kernels.hpp"
#include "edibench/rng.hpp"

namespace edibench {

namespace {

struct Dense {
    std::size_t in = 0, out = 0;
    std::vector<float> w;  // in x out, row-major
    std::vector<float> b;
    std::vector<float> gw, gb;
    std::vector<float> mw, vw, mb, vb;
};

class StatisticsNetwork {
public:
    StatisticsNetwork(std::size_t input, const std::vector<int>& hidden, Rng& rng) {
        std::size_t prev = input;
        std::vector<std::size_t> sizes;
        for (int h : hidden) sizes.push_back(static_cast<std::size_t>(h));
        sizes.push_back(1);
        for (std::size_t s : sizes) {
            Dense l;
            l.in = prev;
            l.out = s;
            float bound = 1.0f / std::sqrt(static_cast<float>(prev));
            l.w.resize(prev * s);
            l.b.resize(s);
            for (auto& v : l.w) v = bound * static_cast<float>(2.0 * uniform01(rng) - 1.0);
            for (auto& v : l.b) v = bound * static_cast<float>(2.0 * uniform01(rng) - 1.0);
            l.gw.assign(l.w.size(), 0.0f);
            l.gb.assign(l.b.size(), 0.0f);
            l.mw.assign(l.w.size(), 0.0f);
            l.vw.assign(l.w.size(), 0.0f);
            l.mb.assign(l.b.size(), 0.0f);
            l.vb.assign(l.b.size(), 0.0f);
            layers_.push_back(std::move(l));
            prev = s;
        }
        std::size_t widest = 0;
        for (const auto& l : layers_) widest = std::max(widest, l.w.size());
        wt_.resize(widest);
        acts_.resize(layers_.size() + 1);
        grads_.resize(layers_.size() + 1);
    }

    // Forward pass over `rows` inputs; returns a pointer to the scalar outputs.
    const float* forward(const float* x, std::size_t rows) {
        acts_[0].assign(x, x + rows * layers_[0].in);
        for (std::size_t l = 0; l < layers_.size(); ++l) {
            const Dense& L = layers_[l];
            auto& out = acts_[l + 1];
            out.resize(rows * L.out);
            for (std::size_t r = 0; r < rows; ++r) std::copy(L.b.begin(), L.b.end(), out.begin() + r * L.out);
            if (L.out == 1) {
                for (std::size_t r = 0; r < rows; ++r) out[r] += kernels::dot(&acts_[l][r * L.in], L.w.data(), L.in);
            } else {
                kernels::gemm_nn(acts_[l].data(), L.w.data(), out.data(), rows, L.in, L.out);
            }
            if (l + 1 < layers_.size())
                for (auto& v : out) v = v > 0.0f ? v : 0.0f;
        }
        return acts_.back().data();
    }

    // Accumulates parameter gradients given dLoss/dOutput for the last forward batch.
    void backward(const std::vector<float>& grad_out, std::size_t rows) {
        for (auto& L : layers_) {
            std::fill(L.gw.begin(), L.gw.end(), 0.0f);
            std::fill(L.gb.begin(), L.gb.end(), 0.0f);
        }
        grads_.back() = grad_out;
        for (std::size_t li = layers_.size(); li-- > 0;) {
            Dense& L = layers_[li];
            auto& dz = grads_[li + 1];
            const auto& a = acts_[li];
            if (li + 1 < layers_.size()) {
                const auto& h = acts_[li + 1];
                for (std::size_t t = 0; t < dz.size(); ++t)
                    if (h[t] <= 0.0f) dz[t] = 0.0f;
            }
            for (std::size_t r = 0; r < rows; ++r)
                for (std::size_t o = 0; o < L.out; ++o) L.gb[o] += dz[r * L.out + o];
            if (L.out == 1) {
                for (std::size_t r = 0; r < rows; ++r)
                    if (dz[r] != 0.0f) kernels::axpy(dz[r], &a[r * L.in], L.gw.data(), L.in);
            } else {
                kernels::gemm_tn(a.data(), dz.data(), L.gw.data(), rows, L.in, L.out);
            }
            if (li == 0) break;
            auto& da = grads_[li];
            da.assign(rows * L.in, 0.0f);
            if (L.out == 1) {
                for (std::size_t r = 0; r < rows; ++r)
                    if (dz[r] != 0.0f) kernels::axpy(dz[r], L.w.data(), &da[r * L.in], L.in);
            } else {
                for (std::size_t o = 0; o < L.out; ++o)
                    for (std::size_t j = 0; j < L.in; ++j) wt_[o * L.in + j] = L.w[j * L.out + o];
                for (std::size_t r = 0; r < rows; ++r)
                    kernels::combine_rows(&dz[r * L.out], 1, L.out, wt_.data(), L.in, &da[r * L.in], L.in);
            }
            for (std::size_t t = 0; t < da.size(); ++t)
                if (a[t] <= 0.0f) da[t] = 0.0f;
        }
    }

    void adam_step(double lr, int step) {
        const double b1 = 0.9, b2 = 0.999, eps = 1e-8;
        double c1 = 1.0 - std::pow(b1, step);
        double c2 = 1.0 - std::pow(b2, step);
        auto update = [&](std::vector<float>& p, const std::vector<float>& g, std::vector<float>& m,
                          std::vector<float>& v) {
            for (std::size_t i = 0; i < p.size(); ++i) {
                m[i] = static_cast<float>(b1 * m[i] + (1.0 - b1) * g[i]);
                v[i] = static_cast<float>(b2 * v[i] + (1.0 - b2) * g[i] * g[i]);
                double mh = m[i] / c1;
                double vh = v[i] / c2;
                p[i] -= static_cast<float>(lr * mh / (std::sqrt(vh) + eps));
            }
        };
        for (auto& L : layers_) {
            update(L.w, L.gw, L.mw, L.vw);
            update(L.b, L.gb, L.mb, L.vb);
        }
    }

private:
    std::vector<Dense> layers_;
    std::vector<std::vector<float>> acts_;
    std::vector<std::vector<float>> grads_;
    std::vector<float> wt_;
};

std::vector<float> standardized(const Matrix& m) {
    std::vector<float> out(m.data.size());
    for (std::size_t c = 0; c < m.cols; ++c) {
        double mean = 0.0;
        for (std::size_t r = 0; r < m.rows; ++r) mean += m(r, c);
        mean /= static_cast<double>(m.rows);
        double var = 0.0;
        for (std::size_t r = 0; r < m.rows; ++r) var += (m(r, c) - mean) * (m(r, c) - mean);
        double sd = std::sqrt(var / static_cast<double>(m.rows));
        double inv = sd > 0.0 ? 1.0 / sd : 1.0;
        for (std::size_t r = 0; r < m.rows; ++r) out[r * m.cols + c] = static_cast<float>((m(r, c) - mean) * inv);
    }
    return out;
}

}  // namespace

double neural_dv_mi(const Matrix& x, const Matrix& y, const DvConfig& cfg) {
    cfg.validate();
    if (x.rows != y.rows) throw Error(ErrorCode::LengthMismatch, "DV inputs differ in length");
    if (x.cols == 0 || y.cols == 0) throw Error(ErrorCode::EmptyInput, "DV inputs need at least one column");
    const std::size_t n = x.rows;
    const std::size_t batch = static_cast<std::size_t>(cfg.batch_size);
    if (n < 2 * batch) throw Error(ErrorCode::TooFewSamples, "DV estimator needs at least 2 x batch_size samples");

    Rng rng(hash64(cfg.seed, 0x6476ULL));
    const std::size_t dx = x.cols, dy = y.cols, in = dx + dy;
    auto xs = standardized(x);
    auto ys = standardized(y);
    StatisticsNetwork net(in, cfg.hidden_layers, rng);

    auto perm = permutation(n, rng);
    std::vector<std::size_t> train(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n / 2));
    std::vector<std::size_t> test(perm.begin() + static_cast<std::ptrdiff_t>(n / 2), perm.end());
    auto test_shuffle = permutation(test.size(), rng);

    auto fill_row = [&](float* dst, std::size_t xi, std::size_t yi) {
        std::copy_n(&xs[xi * dx], dx, dst);
        std::copy_n(&ys[yi * dy], dy, dst + dx);
    };

    std::vector<float> input(2 * batch * in);
    std::vector<float> grad(2 * batch);
    double ema = -1.0;
    int step = 0;
    std::vector<double> bounds;
    const std::size_t batches = train.size() / batch;
    const std::size_t eval_chunk = 1024;
    std::vector<float> eval_in(eval_chunk * in);

    for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
        for (std::size_t i = train.size(); i > 1; --i) std::swap(train[i - 1], train[uniform_index(rng, i)]);
        for (std::size_t bi = 0; bi < batches; ++bi) {
            const std::size_t* idx = &train[bi * batch];
            auto shuffle = permutation(batch, rng);
            for (std::size_t r = 0; r < batch; ++r) {
                fill_row(&input[r * in], idx[r], idx[r]);
                fill_row(&input[(batch + r) * in], idx[r], idx[shuffle[r]]);
            }
            const float* t = net.forward(input.data(), 2 * batch);
            double mean_exp = 0.0;
            for (std::size_t r = 0; r < batch; ++r) mean_exp += std::exp(static_cast<double>(t[batch + r]));
            mean_exp /= static_cast<double>(batch);
            if (!std::isfinite(mean_exp)) throw Error(ErrorCode::TrainingDiverged, "non-finite DV objective");
            ema = ema < 0.0 ? mean_exp : (1.0 - cfg.ema_rate) * ema + cfg.ema_rate * mean_exp;
            const float inv_b = 1.0f / static_cast<float>(batch);
            for (std::size_t r = 0; r < batch; ++r) {
                grad[r] = -inv_b;
                grad[batch + r] =
                    static_cast<float>(std::exp(static_cast<double>(t[batch + r])) / (static_cast<double>(batch) * ema));
            }
            net.backward(grad, 2 * batch);
            net.adam_step(cfg.learning_rate, ++step);
        }
        if (epoch >= cfg.max_epochs - 10) {
            // Held-out bound: mean T on joint pairs minus log-mean-exp T on shuffled pairs.
            double sum_joint = 0.0;
            std::vector<double> marg;
            marg.reserve(test.size());
            for (int pass = 0; pass < 2; ++pass) {
                for (std::size_t s = 0; s < test.size(); s += eval_chunk) {
                    std::size_t m = std::min(eval_chunk, test.size() - s);
                    for (std::size_t r = 0; r < m; ++r) {
                        std::size_t xi = test[s + r];
                        std::size_t yi = pass == 0 ? xi : test[test_shuffle[s + r]];
                        fill_row(&eval_in[r * in], xi, yi);
                    }
                    const float* t = net.forward(eval_in.data(), m);
                    for (std::size_t r = 0; r < m; ++r) {
                        if (pass == 0)
                            sum_joint += t[r];
                        else
                            marg.push_back(t[r]);
                    }
                }
            }
            double mx = *std::max_element(marg.begin(), marg.end());
            double se = 0.0;
            for (double v : marg) se += std::exp(v - mx);
            double lme = mx + std::log(se / static_cast<double>(marg.size()));
            bounds.push_back(sum_joint / static_cast<double>(test.size()) - lme);
        }
    }
    double est = 0.0;
    for (double b : bounds) est += b;
    est /= static_cast<double>(bounds.size());
    if (!std::isfinite(est) || est > std::log(static_cast<double>(n)))
        throw Error(ErrorCode::TrainingDiverged, "DV bound is non-finite or exceeds ln N");
    return est > 0.0 ? est : 0.0;
}

}  // namespace edibench
