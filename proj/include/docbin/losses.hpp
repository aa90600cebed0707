#pragma once

#include <functional>
#include <span>
#include <vector>

#include "docbin/image.hpp"

namespace docbin {

/// Probability map entering the supervised losses. Values constructed through
/// from_image/from_values are clamped into [eps, 1-eps].
struct ProbMap {
    int width = 0;
    int height = 0;
    std::vector<double> values;

    static constexpr double kDefaultClampEps = 1e-7;

    static ProbMap from_values(int w, int h, std::vector<double> vals, double eps = kDefaultClampEps);
    /// Interprets an 8-bit-range image as probabilities via v/255.
    static ProbMap from_image(const FloatImage& img, double eps = kDefaultClampEps);

    double at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
    std::size_t size() const { return values.size(); }
};

struct LossConfig {
    double lambda1 = 25.0;
    double lambda2 = 25.0;
    double lambda_baseline = 50.0;
    double alpha = 10.0;
    double clamp_eps = 1e-7;
};

/// D(candidate, condition) -> scalar. Deterministic and finite on valid input.
using CriticFn = std::function<double(const ProbMap&, const FloatImage&)>;
/// G(condition) -> probability map with the condition's dims.
using GeneratorFn = std::function<ProbMap(const FloatImage&)>;

struct LossValue {
    double loss = 0.0;
    std::vector<double> grad;  // d loss / d pred, per pixel
};

/// Mean binary cross-entropy, -mean[y log yhat + (1-y) log(1-yhat)],
/// with its analytic gradient w.r.t. yhat.
LossValue bce(const ProbMap& pred, const ProbMap& gt);

/// Soft Dice, 1 - 2<yhat,y> / (<yhat,yhat> + <y,y>), with analytic gradient.
LossValue soft_dice(const ProbMap& pred, const ProbMap& gt);

/// Pointwise eps*y + (1-eps)*g.
ProbMap wgan_interpolate(const ProbMap& y, const ProbMap& g, double eps);

/// alpha * (||grad_yhat D(yhat, x)||_2 - 1)^2, with the critic gradient taken
/// by central finite differences per coordinate.
double gradient_penalty(const CriticFn& critic, const ProbMap& point, const FloatImage& condition,
                        double alpha, double fd_step = 1e-4);

/// -D(G(x), x) + lambda1*BCE + lambda2*SoftDice; with baseline = true, the
/// Dice term is dropped and BCE is weighted by lambda_baseline.
double generator_objective(const CriticFn& critic, const GeneratorFn& gen, const FloatImage& x,
                           const ProbMap& y, const LossConfig& cfg, bool baseline = false);

/// -D(y,x) + D(g,x) + gradient penalty at the eps-interpolate of (y, g).
double discriminator_objective(const CriticFn& critic, const ProbMap& y, const ProbMap& g,
                               const FloatImage& x, double eps, const LossConfig& cfg);

struct GradCheckResult {
    double max_rel_err = 0.0;
    std::size_t worst_index = 0;
};

/// Compares an analytic gradient against central differences of `fn` at
/// `point`. Per-component relative error uses the numeric value as reference
/// with an absolute floor, so a gradient scaled by 2 reports an error of 1.
GradCheckResult check_grad(const std::function<double(const ProbMap&)>& fn,
                           std::span<const double> analytic_grad, const ProbMap& point,
                           double fd_step = 1e-4, double denom_floor = 1e-2);

}  // namespace docbin
