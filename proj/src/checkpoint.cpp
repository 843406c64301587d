#include "mlad/checkpoint.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "mlad/error.hpp"

namespace mlad {

namespace {

constexpr const char* kMagic = "MLAD-CHECKPOINT";
constexpr int kVersion = 1;

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_le64(std::ostream& os, const double* data, std::size_t n) {
    // Memory layout is little-endian on every supported target; write raw.
    os.write(reinterpret_cast<const char*>(data),
             static_cast<std::streamsize>(n * sizeof(double)));
}

struct NamedTensor {
    std::string name;
    Tensor tensor;
};

std::vector<NamedTensor> collect(const TrainedModel& model) {
    std::vector<NamedTensor> out;
    for (const auto& p : model.enc.all()) out.push_back({p->name, p->value});
    for (const auto& p : model.head.all()) out.push_back({p->name, p->value});

    const int K = model.cfg.K;
    Tensor phi = Tensor::zeros({1, K});
    Tensor active = Tensor::zeros({1, K});
    for (int k = 0; k < K; ++k) {
        phi.data()[static_cast<std::size_t>(k)] = model.stats.phi[static_cast<std::size_t>(k)];
        active.data()[static_cast<std::size_t>(k)] =
            model.stats.active[static_cast<std::size_t>(k)] ? 1.0 : 0.0;
    }
    out.push_back({"gmm.phi", phi});
    out.push_back({"gmm.active", active});
    out.push_back({"gmm.mu", model.stats.mu});
    for (int k = 0; k < K; ++k) {
        out.push_back({"gmm.sigma" + std::to_string(k),
                       model.stats.sigma[static_cast<std::size_t>(k)]});
    }
    Tensor quant = Tensor::zeros({1, static_cast<int>(model.train_energy_quantiles.size())});
    std::copy(model.train_energy_quantiles.begin(), model.train_energy_quantiles.end(),
              quant.data().begin());
    out.push_back({"detect.energy_quantiles", quant});
    return out;
}

} // namespace

void save_model(const TrainedModel& model, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw DataError("cannot open " + path + " for writing");

    const auto tensors = collect(model);
    const ModelConfig& c = model.cfg;
    os << kMagic << ' ' << kVersion << '\n';
    os << "config"
       << " d=" << c.d << " d_h=" << c.d_h << " d_ff=" << c.d_ff << " heads=" << c.heads
       << " layers=" << c.layers << " K=" << c.K << " alpha=" << fmt_double(c.alpha)
       << " alpha_membership=" << fmt_double(c.alpha_membership)
       << " dropout=" << fmt_double(c.dropout) << " epsilon=" << fmt_double(c.epsilon)
       << " recon_target=" << (c.recon_target == ReconTarget::Pooled ? "pooled" : "per_position")
       << " positional=" << (c.positional ? 1 : 0) << " seed=" << c.seed << '\n';
    os << "tensors " << tensors.size() << '\n';
    for (const auto& nt : tensors) {
        os << "tensor " << nt.name << ' ' << nt.tensor.rank();
        for (int d : nt.tensor.shape()) os << ' ' << d;
        os << '\n';
    }
    os << "end\n";
    for (const auto& nt : tensors) {
        write_le64(os, nt.tensor.raw(), nt.tensor.numel());
    }
    if (!os) throw DataError("write failed for " + path);
}

TrainedModel load_model(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw DataError("cannot open checkpoint " + path);

    std::string line;
    if (!std::getline(is, line)) throw DataError("empty checkpoint " + path);
    {
        std::istringstream hs(line);
        std::string magic;
        int version = -1;
        hs >> magic >> version;
        if (magic != kMagic)
            throw DataError(path + " is not a checkpoint (bad magic '" + magic + "')");
        if (version != kVersion)
            throw DataError("checkpoint version mismatch: file has " +
                            std::to_string(version) + ", this build reads " +
                            std::to_string(kVersion));
    }

    ModelConfig cfg;
    if (!std::getline(is, line) || line.rfind("config ", 0) != 0)
        throw DataError(path + ": missing config line");
    {
        std::istringstream cs(line.substr(7));
        std::string kv;
        while (cs >> kv) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) throw DataError(path + ": bad config token " + kv);
            const std::string key = kv.substr(0, eq);
            const std::string value = kv.substr(eq + 1);
            if (key == "d") cfg.d = std::stoi(value);
            else if (key == "d_h") cfg.d_h = std::stoi(value);
            else if (key == "d_ff") cfg.d_ff = std::stoi(value);
            else if (key == "heads") cfg.heads = std::stoi(value);
            else if (key == "layers") cfg.layers = std::stoi(value);
            else if (key == "K") cfg.K = std::stoi(value);
            else if (key == "alpha") cfg.alpha = std::stod(value);
            else if (key == "alpha_membership") cfg.alpha_membership = std::stod(value);
            else if (key == "dropout") cfg.dropout = std::stod(value);
            else if (key == "epsilon") cfg.epsilon = std::stod(value);
            else if (key == "recon_target")
                cfg.recon_target = value == "pooled" ? ReconTarget::Pooled
                                                     : ReconTarget::PerPosition;
            else if (key == "positional") cfg.positional = value != "0";
            else if (key == "seed") cfg.seed = std::stoull(value);
            else throw DataError(path + ": unknown config key " + key);
        }
    }

    std::size_t n_tensors = 0;
    if (!std::getline(is, line) || std::sscanf(line.c_str(), "tensors %zu", &n_tensors) != 1)
        throw DataError(path + ": missing tensors line");

    struct Entry {
        std::string name;
        std::vector<int> shape;
    };
    std::vector<Entry> entries;
    for (std::size_t i = 0; i < n_tensors; ++i) {
        if (!std::getline(is, line)) throw DataError(path + ": truncated tensor list");
        std::istringstream ts(line);
        std::string tag;
        Entry e;
        int rank = 0;
        ts >> tag >> e.name >> rank;
        if (tag != "tensor" || rank < 0) throw DataError(path + ": bad tensor line " + line);
        for (int r = 0; r < rank; ++r) {
            int d = 0;
            ts >> d;
            e.shape.push_back(d);
        }
        entries.push_back(std::move(e));
    }
    if (!std::getline(is, line) || line != "end")
        throw DataError(path + ": missing end-of-header marker");

    std::map<std::string, Tensor> by_name;
    for (const auto& e : entries) {
        std::size_t n = 1;
        for (int d : e.shape) n *= static_cast<std::size_t>(d);
        std::vector<double> data(n);
        is.read(reinterpret_cast<char*>(data.data()),
                static_cast<std::streamsize>(n * sizeof(double)));
        if (!is) throw DataError(path + ": truncated payload for tensor " + e.name);
        by_name.emplace(e.name, Tensor::from(e.shape, std::move(data)));
    }

    auto take = [&](const std::string& name) -> Tensor {
        auto it = by_name.find(name);
        if (it == by_name.end()) throw DataError(path + ": missing tensor " + name);
        return it->second;
    };

    TrainedModel model;
    model.cfg = cfg;
    Rng rng(cfg.seed);
    model.enc = EncoderParams::init(cfg, rng);
    model.head = MembershipHead::init(cfg.d_h, cfg.K, cfg.membership_alpha(), rng);
    for (auto& p : model.enc.all()) {
        Tensor t = take(p->name);
        if (!t.same_shape(p->value))
            throw DataError(path + ": tensor " + p->name + " has shape " + t.shape_string() +
                            ", expected " + p->value.shape_string());
        p->value = std::move(t);
    }
    for (auto& p : model.head.all()) {
        Tensor t = take(p->name);
        if (!t.same_shape(p->value))
            throw DataError(path + ": tensor " + p->name + " has shape " + t.shape_string());
        p->value = std::move(t);
    }

    const Tensor phi = take("gmm.phi");
    const Tensor active = take("gmm.active");
    model.stats.epsilon = cfg.epsilon;
    model.stats.phi.assign(phi.data().begin(), phi.data().end());
    for (double a : active.data()) model.stats.active.push_back(a != 0.0);
    model.stats.mu = take("gmm.mu");
    for (int k = 0; k < cfg.K; ++k) {
        model.stats.sigma.push_back(take("gmm.sigma" + std::to_string(k)));
    }
    const Tensor quant = take("detect.energy_quantiles");
    model.train_energy_quantiles.assign(quant.data().begin(), quant.data().end());
    return model;
}

} // namespace mlad
