#include "sbtm/score_model.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

namespace sbtm {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

std::string to_string(Activation a) {
    switch (a) {
        case Activation::tanh: return "tanh";
    }
    return "unknown";
}

Activation activation_from_string(const std::string& name) {
    if (name == "tanh") return Activation::tanh;
    throw std::invalid_argument("unknown activation '" + name + "' (supported: tanh)");
}

std::size_t Architecture::parameter_count() const {
    const std::size_t d = input_dim;
    const std::size_t w = width;
    if (hidden_layers == 0) return d * d + d;
    return (w * d + w) + static_cast<std::size_t>(hidden_layers) * (w * w + w) + (d * w + d);
}

ScoreModel::ScoreModel(const Architecture& arch) : arch_(arch) {
    if (arch.input_dim < 1) throw std::invalid_argument("ScoreModel: input_dim must be >= 1");
    if (arch.hidden_layers < 0) throw std::invalid_argument("ScoreModel: hidden_layers must be >= 0");
    if (arch.hidden_layers > 0 && arch.width < 1) throw std::invalid_argument("ScoreModel: width must be >= 1");
    std::size_t offset = 0;
    auto push = [&](Layer::Kind kind, int in, int out) {
        layers_.push_back({kind, in, out, offset});
        offset += static_cast<std::size_t>(in) * out + out;
    };
    const int d = arch.input_dim;
    if (arch.hidden_layers == 0) {
        push(Layer::Kind::affine, d, d);
    } else {
        push(Layer::Kind::affine, d, arch.width);
        for (int l = 0; l < arch.hidden_layers; ++l) push(Layer::Kind::block, arch.width, arch.width);
        push(Layer::Kind::affine, arch.width, d);
    }
    params_ = Vector::Zero(static_cast<Eigen::Index>(offset));
}

ScoreModel ScoreModel::glorot(const Architecture& arch, Rng& rng) {
    ScoreModel model(arch);
    for (std::size_t l = 0; l + 1 < model.layers_.size(); ++l) {
        const auto& layer = model.layers_[l];
        std::uniform_real_distribution<double> uniform(-1.0, 1.0);
        const double limit = std::sqrt(6.0 / (layer.in + layer.out));
        auto w = model.weight(l);
        for (Eigen::Index j = 0; j < w.cols(); ++j)
            for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, j) = limit * uniform(rng);
    }
    return model;
}

Eigen::Map<const Matrix> ScoreModel::weight(std::size_t layer) const {
    const auto& l = layers_.at(layer);
    return {params_.data() + l.offset, l.out, l.in};
}

Eigen::Map<const Vector> ScoreModel::bias(std::size_t layer) const {
    const auto& l = layers_.at(layer);
    return {params_.data() + l.offset + static_cast<std::size_t>(l.in) * l.out, l.out};
}

Eigen::Map<Matrix> ScoreModel::weight(std::size_t layer) {
    const auto& l = layers_.at(layer);
    return {params_.data() + l.offset, l.out, l.in};
}

Eigen::Map<Vector> ScoreModel::bias(std::size_t layer) {
    const auto& l = layers_.at(layer);
    return {params_.data() + l.offset + static_cast<std::size_t>(l.in) * l.out, l.out};
}

Matrix ScoreModel::forward(const Matrix& points) const {
    if (points.rows() != dim()) throw std::invalid_argument("ScoreModel::forward: point dimension mismatch");
    Matrix h = points;
    Matrix z;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        z.noalias() = weight(l) * h;
        z.colwise() += bias(l);
        if (layers_[l].kind == Layer::Kind::affine) {
            h.swap(z);
        } else if (arch_.residual) {
            h.array() += z.array().tanh();
        } else {
            h = z.array().tanh();
        }
    }
    return h;
}

Vector ScoreModel::forward_one(const Eigen::Ref<const Vector>& x) const {
    return forward(Matrix(x)).col(0);
}

ScoreModel::Trace ScoreModel::trace(const Matrix& points, const Matrix& directions) const {
    const Eigen::Index n = points.cols();
    if (points.rows() != dim()) throw std::invalid_argument("ScoreModel::trace: point dimension mismatch");
    if (directions.rows() != dim() || (n > 0 && directions.cols() % n != 0))
        throw std::invalid_argument("ScoreModel::trace: directions must be d x (n k)");
    Trace tr;
    tr.batch = n;
    tr.directions = n > 0 ? static_cast<int>(directions.cols() / n) : 0;
    const int k = tr.directions;

    Matrix h = points;
    Matrix hd = directions;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        const auto w = weight(l);
        Matrix z = w * h;
        z.colwise() += bias(l);
        Matrix zd = w * hd;
        tr.inputs.push_back(h);
        tr.input_tangents.push_back(hd);
        if (layers_[l].kind == Layer::Kind::affine) {
            tr.activations.emplace_back();
            tr.pre_tangents.emplace_back();
            h = std::move(z);
            hd = std::move(zd);
            continue;
        }
        Matrix t = z.array().tanh();
        const Matrix g = 1.0 - t.array().square();
        Matrix out_d(zd.rows(), zd.cols());
        for (int j = 0; j < k; ++j) out_d.middleCols(j * n, n) = g.cwiseProduct(zd.middleCols(j * n, n));
        if (arch_.residual) {
            h += t;
            hd += out_d;
        } else {
            h = t;
            hd = std::move(out_d);
        }
        tr.activations.push_back(std::move(t));
        tr.pre_tangents.push_back(std::move(zd));
    }
    tr.output = std::move(h);
    tr.output_tangent = std::move(hd);
    return tr;
}

Vector ScoreModel::backward(const Trace& tr, const Matrix& value_adjoint, const Matrix& tangent_adjoint) const {
    const Eigen::Index n = tr.batch;
    const int k = tr.directions;
    const bool with_tangent = tangent_adjoint.size() > 0;
    if (value_adjoint.rows() != dim() || value_adjoint.cols() != n)
        throw std::invalid_argument("ScoreModel::backward: value adjoint must be d x n");
    if (with_tangent && (tangent_adjoint.rows() != dim() || tangent_adjoint.cols() != n * k))
        throw std::invalid_argument("ScoreModel::backward: tangent adjoint must be d x (n k)");

    Vector grad = Vector::Zero(params_.size());
    Matrix hbar = value_adjoint;
    Matrix hdbar = tangent_adjoint;
    for (std::size_t idx = layers_.size(); idx-- > 0;) {
        const auto& layer = layers_[idx];
        const auto w = weight(idx);
        Eigen::Map<Matrix> gw(grad.data() + layer.offset, layer.out, layer.in);
        Eigen::Map<Vector> gb(grad.data() + layer.offset + static_cast<std::size_t>(layer.in) * layer.out, layer.out);
        const Matrix& h = tr.inputs[idx];
        const Matrix& hd = tr.input_tangents[idx];

        if (layer.kind == Layer::Kind::affine) {
            gw.noalias() += hbar * h.transpose();
            gb += hbar.rowwise().sum();
            Matrix next = w.transpose() * hbar;
            if (with_tangent) {
                gw.noalias() += hdbar * hd.transpose();
                hdbar = w.transpose() * hdbar;
            }
            hbar = std::move(next);
            continue;
        }

        // out = [h +] t, t = tanh(z), z = W h + b
        // out_dot = [h_dot +] g * z_dot, g = 1 - t^2, z_dot = W h_dot
        const Matrix& t = tr.activations[idx];
        const Matrix g = 1.0 - t.array().square();
        Matrix zbar = g.cwiseProduct(hbar);
        Matrix zdbar;
        if (with_tangent) {
            const Matrix& zd = tr.pre_tangents[idx];
            zdbar.resize(layer.out, n * k);
            Matrix gbar = Matrix::Zero(layer.out, n);
            for (int j = 0; j < k; ++j) {
                zdbar.middleCols(j * n, n) = g.cwiseProduct(hdbar.middleCols(j * n, n));
                gbar += hdbar.middleCols(j * n, n).cwiseProduct(zd.middleCols(j * n, n));
            }
            zbar.array() -= 2.0 * g.array() * t.array() * gbar.array();
            gw.noalias() += zdbar * hd.transpose();
        }
        gw.noalias() += zbar * h.transpose();
        gb += zbar.rowwise().sum();

        Matrix next = w.transpose() * zbar;
        if (arch_.residual) next += hbar;
        hbar = std::move(next);
        if (with_tangent) {
            Matrix next_d = w.transpose() * zdbar;
            if (arch_.residual) next_d += hdbar;
            hdbar = std::move(next_d);
        }
    }
    return grad;
}

Matrix coordinate_directions(int dim, Eigen::Index n) {
    Matrix dirs = Matrix::Zero(dim, n * dim);
    for (int a = 0; a < dim; ++a) dirs.row(a).segment(a * n, n).setOnes();
    return dirs;
}

Vector contract_directions(const Matrix& directions, const Matrix& tangents, Eigen::Index n) {
    const Eigen::Index k = n > 0 ? directions.cols() / n : 0;
    Vector out = Vector::Zero(n);
    for (Eigen::Index j = 0; j < k; ++j)
        out += directions.middleCols(j * n, n).cwiseProduct(tangents.middleCols(j * n, n)).colwise().sum().transpose();
    return out;
}

Vector ScoreModel::divergence_exact(const Matrix& points) const {
    const Eigen::Index n = points.cols();
    const Matrix dirs = coordinate_directions(dim(), n);
    const Trace tr = trace(points, dirs);
    return contract_directions(dirs, tr.output_tangent, n);
}

Vector ScoreModel::divergence_hutchinson(const Matrix& points, int probes, Rng& rng) const {
    if (probes < 1) throw std::invalid_argument("divergence_hutchinson: probes must be >= 1");
    const Eigen::Index n = points.cols();
    const Matrix dirs = rademacher(dim(), n * probes, rng);
    const Trace tr = trace(points, dirs);
    return contract_directions(dirs, tr.output_tangent, n) / probes;
}

Matrix ScoreModel::jacobian(const Eigen::Ref<const Vector>& x) const {
    const Matrix dirs = coordinate_directions(dim(), 1);
    return trace(Matrix(x), dirs).output_tangent;
}

AdamWState::AdamWState(std::size_t parameter_count, AdamWOptions opts)
    : options(opts),
      first_moment(Vector::Zero(static_cast<Eigen::Index>(parameter_count))),
      second_moment(Vector::Zero(static_cast<Eigen::Index>(parameter_count))) {}

void adamw_step(Vector& params, AdamWState& state, const Vector& grad) {
    if (grad.size() != params.size() || state.first_moment.size() != params.size())
        throw std::invalid_argument("adamw_step: gradient/state length does not match parameters");
    const auto& o = state.options;
    ++state.step;
    state.first_moment = o.beta1 * state.first_moment + (1.0 - o.beta1) * grad;
    state.second_moment = o.beta2 * state.second_moment + (1.0 - o.beta2) * grad.cwiseAbs2();
    const double c1 = 1.0 - std::pow(o.beta1, static_cast<double>(state.step));
    const double c2 = 1.0 - std::pow(o.beta2, static_cast<double>(state.step));
    params.array() -= o.learning_rate * ((state.first_moment.array() / c1) /
                                             ((state.second_moment.array() / c2).sqrt() + o.epsilon) +
                                         o.weight_decay * params.array());
}

namespace {

constexpr std::array<char, 8> kCheckpointMagic = {'S', 'B', 'T', 'M', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kCheckpointVersion = 1;

template <class T>
void put(std::ostream& os, T value) {
    os.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <class T>
T get(std::istream& is, const std::string& path) {
    T value{};
    if (!is.read(reinterpret_cast<char*>(&value), sizeof(T)))
        throw std::runtime_error("load_checkpoint: truncated file " + path);
    return value;
}

}  // namespace

void save_checkpoint(const ScoreModel& model, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("save_checkpoint: cannot open " + path);
    os.write(kCheckpointMagic.data(), kCheckpointMagic.size());
    put<std::uint32_t>(os, kCheckpointVersion);
    put<std::uint32_t>(os, 0);
    const auto& a = model.arch();
    put<std::uint32_t>(os, static_cast<std::uint32_t>(a.input_dim));
    put<std::uint32_t>(os, static_cast<std::uint32_t>(a.width));
    put<std::uint32_t>(os, static_cast<std::uint32_t>(a.hidden_layers));
    put<std::uint32_t>(os, static_cast<std::uint32_t>(a.activation));
    put<std::uint32_t>(os, a.residual ? 1u : 0u);
    put<std::uint32_t>(os, 0);
    put<std::uint64_t>(os, model.parameter_count());
    os.write(reinterpret_cast<const char*>(model.params().data()),
             static_cast<std::streamsize>(model.parameter_count() * sizeof(double)));
    if (!os) throw std::runtime_error("save_checkpoint: write failed for " + path);
}

ScoreModel load_checkpoint(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("load_checkpoint: cannot open " + path);
    std::array<char, 8> magic{};
    is.read(magic.data(), magic.size());
    if (!is || magic != kCheckpointMagic) throw std::runtime_error("load_checkpoint: bad magic in " + path);
    const auto version = get<std::uint32_t>(is, path);
    if (version != kCheckpointVersion)
        throw std::runtime_error("load_checkpoint: unsupported version " + std::to_string(version));
    get<std::uint32_t>(is, path);
    Architecture arch;
    arch.input_dim = static_cast<int>(get<std::uint32_t>(is, path));
    arch.width = static_cast<int>(get<std::uint32_t>(is, path));
    arch.hidden_layers = static_cast<int>(get<std::uint32_t>(is, path));
    arch.activation = static_cast<Activation>(get<std::uint32_t>(is, path));
    arch.residual = get<std::uint32_t>(is, path) != 0;
    get<std::uint32_t>(is, path);
    const auto count = get<std::uint64_t>(is, path);
    ScoreModel model(arch);
    if (count != model.parameter_count())
        throw std::runtime_error("load_checkpoint: parameter count does not match architecture in " + path);
    is.read(reinterpret_cast<char*>(model.params().data()), static_cast<std::streamsize>(count * sizeof(double)));
    if (!is) throw std::runtime_error("load_checkpoint: truncated parameters in " + path);
    return model;
}

}  // namespace sbtm
