#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sbtm/common.hpp"

namespace sbtm {

enum class Activation : std::uint32_t { tanh = 0 };

std::string to_string(Activation a);
Activation activation_from_string(const std::string& name);

/// Network shape. With hidden_layers == 0 the model is a single affine map R^d -> R^d;
/// otherwise: affine R^d -> R^w, `hidden_layers` blocks h <- h + act(W h + b), affine R^w -> R^d.
struct Architecture {
    int input_dim = 1;
    int width = 128;
    int hidden_layers = 3;
    Activation activation = Activation::tanh;
    bool residual = true;

    std::size_t parameter_count() const;
    bool operator==(const Architecture&) const = default;
};

/// Feed-forward score network s: R^d -> R^d with a flat parameter vector.
///
/// Parameters are laid out layer by layer, each layer as its weight matrix
/// (out x in, column-major) followed by its bias.
class ScoreModel {
public:
    struct Layer {
        enum class Kind { affine, block } kind;
        int in;
        int out;
        std::size_t offset;  // weight start in the flat vector; bias follows at offset + in * out
    };

    /// Values and directional derivatives recorded by `trace` for the reverse pass.
    /// Directions are stacked as k blocks of n columns: block j holds the j-th direction of every point.
    struct Trace {
        int directions = 0;
        Eigen::Index batch = 0;
        std::vector<Matrix> inputs;          // layer inputs h, in x n
        std::vector<Matrix> input_tangents;  // layer input tangents, in x (n k)
        std::vector<Matrix> activations;     // block layers: act(W h + b), empty for affine
        std::vector<Matrix> pre_tangents;    // block layers: W h_dot
        Matrix output;                       // d x n
        Matrix output_tangent;               // d x (n k)
    };

    /// All parameters zero.
    explicit ScoreModel(const Architecture& arch);

    /// Glorot-uniform weights, zero biases, zero output layer (so s == 0 initially).
    static ScoreModel glorot(const Architecture& arch, Rng& rng);

    const Architecture& arch() const { return arch_; }
    int dim() const { return arch_.input_dim; }
    std::size_t parameter_count() const { return static_cast<std::size_t>(params_.size()); }
    const std::vector<Layer>& layers() const { return layers_; }

    Vector& params() { return params_; }
    const Vector& params() const { return params_; }

    Eigen::Map<const Matrix> weight(std::size_t layer) const;
    Eigen::Map<const Vector> bias(std::size_t layer) const;
    Eigen::Map<Matrix> weight(std::size_t layer);
    Eigen::Map<Vector> bias(std::size_t layer);

    /// d x n -> d x n.
    Matrix forward(const Matrix& points) const;
    Vector forward_one(const Eigen::Ref<const Vector>& x) const;

    /// Forward pass carrying the Jacobian-vector products J_s(x_i) v for each stacked direction.
    Trace trace(const Matrix& points, const Matrix& directions) const;

    /// Gradient w.r.t. the parameters of <value_adjoint, s> + <tangent_adjoint, J_s v>.
    /// `tangent_adjoint` may be empty when only values enter the objective.
    Vector backward(const Trace& trace, const Matrix& value_adjoint, const Matrix& tangent_adjoint) const;

    /// Exact divergence via d forward-mode passes, one per coordinate direction.
    Vector divergence_exact(const Matrix& points) const;

    /// Hutchinson estimate (1/m) sum_k eps_k^T J eps_k with Rademacher probes.
    Vector divergence_hutchinson(const Matrix& points, int probes, Rng& rng) const;

    /// Full Jacobian J_s(x) (d x d) via d tangent passes.
    Matrix jacobian(const Eigen::Ref<const Vector>& x) const;

private:
    Architecture arch_;
    std::vector<Layer> layers_;
    Vector params_;
};

/// Directions e_1..e_d stacked for n points (d x (n d)).
Matrix coordinate_directions(int dim, Eigen::Index n);

/// Sum over directions of <v_j, J v_j> per point, given stacked tangents and directions.
Vector contract_directions(const Matrix& directions, const Matrix& tangents, Eigen::Index n);

struct AdamWOptions {
    double learning_rate = 5e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    double weight_decay = 1e-4;

    bool operator==(const AdamWOptions&) const = default;
};

/// Adaptive moments with bias correction and decoupled weight decay:
/// theta <- theta - lr * (m_hat / (sqrt(v_hat) + eps) + wd * theta).
struct AdamWState {
    AdamWOptions options;
    Vector first_moment;
    Vector second_moment;
    std::int64_t step = 0;

    AdamWState() = default;
    AdamWState(std::size_t parameter_count, AdamWOptions opts);
};

void adamw_step(Vector& params, AdamWState& state, const Vector& grad);

/// Checkpoint layout (little-endian):
///   bytes 0-7   magic "SBTMCKPT"
///   bytes 8-11  u32 format version (1)
///   bytes 12-15 u32 reserved (0)
///   u32 input_dim, u32 width, u32 hidden_layers, u32 activation, u32 residual, u32 reserved
///   u64 parameter count N, then N f64 parameters.
void save_checkpoint(const ScoreModel& model, const std::string& path);
ScoreModel load_checkpoint(const std::string& path);

}  // namespace sbtm
