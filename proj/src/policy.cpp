#include "tsr/policy.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

namespace tsr {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

bool valid(const ActionMask& mask, int a) {
    return mask.empty() || mask[static_cast<std::size_t>(a)];
}

void check_shapes(const PolicyParams& p, const std::vector<double>& features,
                  const ActionMask& mask) {
    if (static_cast<int>(features.size()) != p.feature_dim)
        throw ContractViolation("policy: feature size mismatch");
    if (!mask.empty() && static_cast<int>(mask.size()) != p.action_count)
        throw ContractViolation("policy: mask size mismatch");
}

}  // namespace

PolicyParams PolicyParams::zeros(int action_count, int feature_dim, bool has_value) {
    if (action_count < 1 || feature_dim < 1)
        throw ConfigError("policy: bad parameter shape");
    PolicyParams p;
    p.action_count = action_count;
    p.feature_dim = feature_dim;
    p.has_value = has_value;
    p.w.assign(static_cast<std::size_t>(action_count + (has_value ? 1 : 0)) *
                   static_cast<std::size_t>(feature_dim),
               0.0);
    return p;
}

std::vector<double> action_logits(const PolicyParams& p, const std::vector<double>& features) {
    check_shapes(p, features, {});
    std::vector<double> logits(static_cast<std::size_t>(p.action_count), 0.0);
    for (int a = 0; a < p.action_count; ++a) {
        const double* row = p.row(a);
        double z = 0.0;
        for (int f = 0; f < p.feature_dim; ++f) z += row[f] * features[static_cast<std::size_t>(f)];
        logits[static_cast<std::size_t>(a)] = z;
    }
    return logits;
}

ActionDist action_dist(const PolicyParams& p, const std::vector<double>& features,
                       const ActionMask& mask, double temperature) {
    check_shapes(p, features, mask);
    if (!(temperature > 0.0)) throw ConfigError("policy: temperature must be positive");

    auto logits = action_logits(p, features);
    double max_z = kNegInf;
    for (int a = 0; a < p.action_count; ++a)
        if (valid(mask, a)) max_z = std::max(max_z, logits[static_cast<std::size_t>(a)] / temperature);
    if (max_z == kNegInf) throw ContractViolation("policy: no valid action");

    ActionDist d;
    d.probs.assign(static_cast<std::size_t>(p.action_count), 0.0);
    d.log_probs.assign(static_cast<std::size_t>(p.action_count), kNegInf);
    double total = 0.0;
    for (int a = 0; a < p.action_count; ++a) {
        if (!valid(mask, a)) continue;
        double e = std::exp(logits[static_cast<std::size_t>(a)] / temperature - max_z);
        d.probs[static_cast<std::size_t>(a)] = e;
        total += e;
    }
    double log_total = std::log(total);
    for (int a = 0; a < p.action_count; ++a) {
        if (!valid(mask, a)) continue;
        auto ia = static_cast<std::size_t>(a);
        d.log_probs[ia] = logits[ia] / temperature - max_z - log_total;
        d.probs[ia] /= total;
    }
    return d;
}

ActionSample sample_action(const PolicyParams& p, const std::vector<double>& features,
                           const ActionMask& mask, double temperature, rng::Stream& stream) {
    auto d = action_dist(p, features, mask, temperature);
    double u = stream.next_double();
    double cum = 0.0;
    int last_valid = -1;
    for (int a = 0; a < p.action_count; ++a) {
        if (!valid(mask, a)) continue;
        last_valid = a;
        cum += d.probs[static_cast<std::size_t>(a)];
        if (u < cum) return {a, d.log_probs[static_cast<std::size_t>(a)]};
    }
    return {last_valid, d.log_probs[static_cast<std::size_t>(last_valid)]};
}

double action_log_prob(const PolicyParams& p, const std::vector<double>& features,
                       const ActionMask& mask, double temperature, int action) {
    if (action < 0 || action >= p.action_count || !valid(mask, action))
        throw ContractViolation("policy: log_prob of invalid action");
    return action_dist(p, features, mask, temperature).log_probs[static_cast<std::size_t>(action)];
}

std::vector<double> log_prob_grad(const PolicyParams& p, const std::vector<double>& features,
                                  const ActionMask& mask, double temperature, int action) {
    if (action < 0 || action >= p.action_count || !valid(mask, action))
        throw ContractViolation("policy: grad of invalid action");
    auto d = action_dist(p, features, mask, temperature);
    std::vector<double> g(p.size(), 0.0);
    for (int b = 0; b < p.action_count; ++b) {
        if (!valid(mask, b)) continue;
        double coef = ((b == action ? 1.0 : 0.0) - d.probs[static_cast<std::size_t>(b)]) / temperature;
        double* row = g.data() + static_cast<std::size_t>(b) * static_cast<std::size_t>(p.feature_dim);
        for (int f = 0; f < p.feature_dim; ++f) row[f] = coef * features[static_cast<std::size_t>(f)];
    }
    return g;
}

double policy_entropy(const PolicyParams& p, const std::vector<double>& features,
                      const ActionMask& mask, double temperature) {
    auto d = action_dist(p, features, mask, temperature);
    double h = 0.0;
    for (int a = 0; a < p.action_count; ++a) {
        double pa = d.probs[static_cast<std::size_t>(a)];
        if (pa > 0.0) h -= pa * d.log_probs[static_cast<std::size_t>(a)];
    }
    return h;
}

std::vector<double> entropy_grad(const PolicyParams& p, const std::vector<double>& features,
                                 const ActionMask& mask, double temperature) {
    auto d = action_dist(p, features, mask, temperature);
    double h = 0.0;
    for (int a = 0; a < p.action_count; ++a) {
        double pa = d.probs[static_cast<std::size_t>(a)];
        if (pa > 0.0) h -= pa * d.log_probs[static_cast<std::size_t>(a)];
    }
    // dH/dlogit_b = -p_b (log p_b + H), then dlogit_b/dW[b,f] = x_f / T
    std::vector<double> g(p.size(), 0.0);
    for (int b = 0; b < p.action_count; ++b) {
        double pb = d.probs[static_cast<std::size_t>(b)];
        if (pb <= 0.0) continue;
        double coef = -pb * (d.log_probs[static_cast<std::size_t>(b)] + h) / temperature;
        double* row = g.data() + static_cast<std::size_t>(b) * static_cast<std::size_t>(p.feature_dim);
        for (int f = 0; f < p.feature_dim; ++f) row[f] = coef * features[static_cast<std::size_t>(f)];
    }
    return g;
}

double value_of(const PolicyParams& p, const std::vector<double>& features) {
    if (!p.has_value) throw ContractViolation("policy: no value head");
    check_shapes(p, features, {});
    const double* row = p.value_row();
    double v = 0.0;
    for (int f = 0; f < p.feature_dim; ++f) v += row[f] * features[static_cast<std::size_t>(f)];
    return v;
}

std::vector<double> value_grad(const PolicyParams& p, const std::vector<double>& features) {
    if (!p.has_value) throw ContractViolation("policy: no value head");
    check_shapes(p, features, {});
    std::vector<double> g(p.size(), 0.0);
    double* row = g.data() +
                  static_cast<std::size_t>(p.action_count) * static_cast<std::size_t>(p.feature_dim);
    for (int f = 0; f < p.feature_dim; ++f) row[f] = features[static_cast<std::size_t>(f)];
    return g;
}

void adam_update(PolicyParams& p, AdamState& state, const std::vector<double>& grad,
                 const AdamConfig& cfg) {
    if (grad.size() != p.size() || state.m.size() != p.size() || state.v.size() != p.size())
        throw ContractViolation("adam: size mismatch");
    for (double g : grad)
        if (!std::isfinite(g)) throw NumericError("adam: non-finite gradient");

    state.step += 1;
    double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
    double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
    for (std::size_t i = 0; i < grad.size(); ++i) {
        state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * grad[i];
        state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * grad[i] * grad[i];
        double mhat = state.m[i] / bc1;
        double vhat = state.v[i] / bc2;
        p.w[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
    }
}

double l2_norm(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

// -- checkpoint io -- //

namespace {

void write_doubles(std::ostream& out, const std::vector<double>& v) {
    std::ostringstream buf;
    buf << std::hexfloat;
    for (double x : v) buf << x << '\n';
    out << buf.str();
}

std::vector<double> read_doubles(std::istream& in, std::size_t n) {
    std::vector<double> v(n);
    std::string tok;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(in >> tok)) throw ConfigError("checkpoint: truncated parameter block");
        v[i] = std::strtod(tok.c_str(), nullptr);  // strtod handles hexfloats
    }
    return v;
}

}  // namespace

void save_checkpoint(std::ostream& out, const Checkpoint& ckpt) {
    out << "tsr-checkpoint 1\n";
    out << "env " << ckpt.env_name << '\n';
    out << "iteration " << ckpt.iteration << '\n';
    out << "root_seed " << ckpt.root_seed << '\n';
    out << "action_count " << ckpt.params.action_count << '\n';
    out << "feature_dim " << ckpt.params.feature_dim << '\n';
    out << "has_value " << (ckpt.params.has_value ? 1 : 0) << '\n';
    out << "params " << ckpt.params.size() << '\n';
    write_doubles(out, ckpt.params.w);
    out << "adam " << (ckpt.has_adam ? 1 : 0) << '\n';
    if (ckpt.has_adam) {
        out << "adam_step " << ckpt.adam.step << '\n';
        write_doubles(out, ckpt.adam.m);
        write_doubles(out, ckpt.adam.v);
    }
}

Checkpoint load_checkpoint(std::istream& in) {
    auto expect = [&](const char* key) {
        std::string tok;
        if (!(in >> tok) || tok != key)
            throw ConfigError(std::string("checkpoint: expected field ") + key);
    };

    expect("tsr-checkpoint");
    int version = 0;
    in >> version;
    if (version != 1) throw ConfigError("checkpoint: unsupported version");

    Checkpoint ckpt;
    expect("env");
    in >> ckpt.env_name;
    expect("iteration");
    in >> ckpt.iteration;
    expect("root_seed");
    in >> ckpt.root_seed;
    expect("action_count");
    in >> ckpt.params.action_count;
    expect("feature_dim");
    in >> ckpt.params.feature_dim;
    expect("has_value");
    int has_value = 0;
    in >> has_value;
    ckpt.params.has_value = has_value != 0;
    expect("params");
    std::size_t n = 0;
    in >> n;
    std::size_t expected =
        static_cast<std::size_t>(ckpt.params.action_count + (ckpt.params.has_value ? 1 : 0)) *
        static_cast<std::size_t>(ckpt.params.feature_dim);
    if (n != expected) throw ConfigError("checkpoint: parameter count mismatch");
    ckpt.params.w = read_doubles(in, n);
    expect("adam");
    int has_adam = 0;
    in >> has_adam;
    ckpt.has_adam = has_adam != 0;
    if (ckpt.has_adam) {
        expect("adam_step");
        in >> ckpt.adam.step;
        ckpt.adam.m = read_doubles(in, n);
        ckpt.adam.v = read_doubles(in, n);
    }
    return ckpt;
}

void save_checkpoint_file(const std::string& path, const Checkpoint& ckpt) {
    std::ofstream out(path);
    if (!out) throw ConfigError("checkpoint: cannot open for write: " + path);
    save_checkpoint(out, ckpt);
}

Checkpoint load_checkpoint_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("checkpoint: cannot open: " + path);
    return load_checkpoint(in);
}

}  // namespace tsr
