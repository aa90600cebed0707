#include "docbin/losses.hpp"

#include <algorithm>
#include <cmath>

#include "docbin/error.hpp"

namespace docbin {

namespace {

void require_same_dims(const ProbMap& a, const ProbMap& b, const char* who) {
    if (a.width != b.width || a.height != b.height) {
        throw DimensionError(std::string(who) + ": map dimensions differ");
    }
}

}  // namespace

ProbMap ProbMap::from_values(int w, int h, std::vector<double> vals, double eps) {
    if (vals.size() != static_cast<std::size_t>(w) * h) {
        throw DimensionError("ProbMap: value count does not match dimensions");
    }
    for (double& v : vals) v = std::clamp(v, eps, 1.0 - eps);
    return ProbMap{w, h, std::move(vals)};
}

ProbMap ProbMap::from_image(const FloatImage& img, double eps) {
    std::vector<double> vals(img.size());
    for (std::size_t i = 0; i < img.size(); ++i) vals[i] = img.values[i] / 255.0;
    return from_values(img.width, img.height, std::move(vals), eps);
}

LossValue bce(const ProbMap& pred, const ProbMap& gt) {
    require_same_dims(pred, gt, "bce");
    const double n = static_cast<double>(pred.size());
    LossValue out;
    out.grad.resize(pred.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double yh = pred.values[i];
        const double y = gt.values[i];
        acc += y * std::log(yh) + (1.0 - y) * std::log(1.0 - yh);
        out.grad[i] = (-y / yh + (1.0 - y) / (1.0 - yh)) / n;
    }
    out.loss = -acc / n;
    return out;
}

LossValue soft_dice(const ProbMap& pred, const ProbMap& gt) {
    require_same_dims(pred, gt, "soft_dice");
    double dot = 0.0, pred_sq = 0.0, gt_sq = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        dot += pred.values[i] * gt.values[i];
        pred_sq += pred.values[i] * pred.values[i];
        gt_sq += gt.values[i] * gt.values[i];
    }
    const double denom = pred_sq + gt_sq;
    if (denom == 0.0) {
        throw DegenerateInput("soft_dice: both maps are zero");
    }
    LossValue out;
    out.loss = 1.0 - 2.0 * dot / denom;
    out.grad.resize(pred.size());
    for (std::size_t i = 0; i < pred.size(); ++i) {
        out.grad[i] = -2.0 * (gt.values[i] * denom - 2.0 * pred.values[i] * dot) / (denom * denom);
    }
    return out;
}

ProbMap wgan_interpolate(const ProbMap& y, const ProbMap& g, double eps) {
    require_same_dims(y, g, "wgan_interpolate");
    ProbMap out{y.width, y.height, std::vector<double>(y.size())};
    for (std::size_t i = 0; i < y.size(); ++i) {
        out.values[i] = eps * y.values[i] + (1.0 - eps) * g.values[i];
    }
    return out;
}

double gradient_penalty(const CriticFn& critic, const ProbMap& point, const FloatImage& condition,
                        double alpha, double fd_step) {
    ProbMap probe = point;
    double norm_sq = 0.0;
    for (std::size_t i = 0; i < point.size(); ++i) {
        const double original = probe.values[i];
        probe.values[i] = original + fd_step;
        const double plus = critic(probe, condition);
        probe.values[i] = original - fd_step;
        const double minus = critic(probe, condition);
        probe.values[i] = original;
        if (!std::isfinite(plus) || !std::isfinite(minus)) {
            throw NonFiniteCritic("gradient_penalty: critic returned a non-finite value");
        }
        const double partial = (plus - minus) / (2.0 * fd_step);
        norm_sq += partial * partial;
    }
    const double norm = std::sqrt(norm_sq);
    return alpha * (norm - 1.0) * (norm - 1.0);
}

double generator_objective(const CriticFn& critic, const GeneratorFn& gen, const FloatImage& x,
                           const ProbMap& y, const LossConfig& cfg, bool baseline) {
    const ProbMap candidate = gen(x);
    require_same_dims(candidate, y, "generator_objective");
    const double adversarial = -critic(candidate, x);
    if (baseline) {
        return adversarial + cfg.lambda_baseline * bce(candidate, y).loss;
    }
    return adversarial + cfg.lambda1 * bce(candidate, y).loss + cfg.lambda2 * soft_dice(candidate, y).loss;
}

double discriminator_objective(const CriticFn& critic, const ProbMap& y, const ProbMap& g,
                               const FloatImage& x, double eps, const LossConfig& cfg) {
    require_same_dims(y, g, "discriminator_objective");
    const ProbMap mixed = wgan_interpolate(y, g, eps);
    return -critic(y, x) + critic(g, x) + gradient_penalty(critic, mixed, x, cfg.alpha);
}

GradCheckResult check_grad(const std::function<double(const ProbMap&)>& fn,
                           std::span<const double> analytic_grad, const ProbMap& point,
                           double fd_step, double denom_floor) {
    if (analytic_grad.size() != point.size()) {
        throw DimensionError("check_grad: gradient size does not match map size");
    }
    ProbMap probe = point;
    GradCheckResult result;
    for (std::size_t i = 0; i < point.size(); ++i) {
        const double original = probe.values[i];
        probe.values[i] = original + fd_step;
        const double plus = fn(probe);
        probe.values[i] = original - fd_step;
        const double minus = fn(probe);
        probe.values[i] = original;
        const double numeric = (plus - minus) / (2.0 * fd_step);
        const double rel = std::abs(analytic_grad[i] - numeric) / std::max(std::abs(numeric), denom_floor);
        if (rel > result.max_rel_err) {
            result.max_rel_err = rel;
            result.worst_index = i;
        }
    }
    return result;
}

}  // namespace docbin
