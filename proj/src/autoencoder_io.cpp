#include "strad/autoencoder.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace strad {

namespace {

constexpr const char* kMagic = "strad-autoencoder";
constexpr int kVersion = 1;

std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

} // namespace

void save_checkpoint(const Autoencoder& model, const std::filesystem::path& path, const std::vector<std::string>& comments) {
    validate_layer_sizes(model.layer_sizes);
    std::ofstream out(path);
    if (!out) throw Error("cannot write checkpoint " + path.string());
    for (const auto& c : comments) out << "# " << c << '\n';
    out << kMagic << ' ' << kVersion << '\n';
    out << "activation tanh\n";
    out << "sizes";
    for (Index s : model.layer_sizes) out << ' ' << s;
    out << '\n';
    const auto flat = flatten(model.layers);
    out << "parameters " << flat.size() << '\n';
    for (Index i = 0; i < flat.size(); ++i) out << format_double(flat(i)) << '\n';
    if (!out) throw Error("failed writing checkpoint " + path.string());
}

Autoencoder load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw MissingFileError(path.string());
    std::string line;
    auto next_line = [&]() {
        while (std::getline(in, line)) {
            if (!line.empty() && line.front() != '#') return true;
        }
        return false;
    };
    auto fail = [&](const std::string& what) { return Error("malformed checkpoint " + path.string() + ": " + what); };

    if (!next_line()) throw fail("empty file");
    {
        std::istringstream ss(line);
        std::string magic;
        int version = 0;
        ss >> magic >> version;
        if (magic != kMagic) throw fail("bad magic");
        if (version != kVersion) throw fail("unsupported version " + std::to_string(version));
    }
    if (!next_line() || line != "activation tanh") throw fail("expected 'activation tanh'");
    if (!next_line()) throw fail("missing sizes");
    std::vector<Index> sizes;
    {
        std::istringstream ss(line);
        std::string key;
        ss >> key;
        if (key != "sizes") throw fail("expected sizes");
        Index s = 0;
        while (ss >> s) sizes.push_back(s);
    }
    validate_layer_sizes(sizes);
    Autoencoder model = init_model<double>(sizes, 0);
    if (!next_line()) throw fail("missing parameter count");
    Index count = 0;
    {
        std::istringstream ss(line);
        std::string key;
        ss >> key >> count;
        if (key != "parameters" || count != parameter_count(model.layers)) throw fail("parameter count mismatch");
    }
    VectorXd flat(count);
    for (Index i = 0; i < count; ++i) {
        if (!next_line()) throw fail("truncated parameters");
        double v = 0.0;
        const auto res = std::from_chars(line.data(), line.data() + line.size(), v);
        if (res.ec != std::errc() || res.ptr != line.data() + line.size()) throw fail("bad number '" + line + "'");
        flat(i) = v;
    }
    unflatten(flat, model.layers);
    if (!all_finite(model.layers)) throw NumericError("checkpoint contains non-finite parameters");
    return model;
}

} // namespace strad
