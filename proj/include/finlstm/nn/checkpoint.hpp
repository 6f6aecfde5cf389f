#pragma once

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "finlstm/nn/init.hpp"
#include "finlstm/nn/lstm.hpp"

namespace finlstm::nn {

// A trained parameter set plus the metadata needed to reproduce it.
struct Checkpoint {
    InitializerScheme scheme = InitializerScheme::GlorotUniform;
    std::uint64_t seed = 0;
    LstmParameters params;
};

namespace detail {

inline std::string hex_double(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%a", v);
    return buf;
}

} // namespace detail

// Plain-text checkpoint: a header (scheme, shape, seed) followed by every
// parameter block in canonical order. Values are hex floats, so the round
// trip is bit exact.
inline std::string serialize_checkpoint(const Checkpoint& ckpt) {
    std::ostringstream out;
    out << "finlstm-checkpoint 1\n";
    out << "scheme " << scheme_name(ckpt.scheme) << "\n";
    out << "hidden " << ckpt.params.hidden_units() << "\n";
    out << "features " << ckpt.params.input_features() << "\n";
    out << "seed " << ckpt.seed << "\n";
    for (const auto& block : parameter_blocks(ckpt.params)) {
        out << "block " << block.name << " " << block.values.size() << "\n";
        for (std::size_t k = 0; k < block.values.size(); ++k) {
            out << (k == 0 ? "" : " ") << detail::hex_double(block.values[k]);
        }
        out << "\n";
    }
    out << "end\n";
    return out.str();
}

inline Checkpoint parse_checkpoint(std::istream& in, const std::string& context) {
    auto fail = [&](const std::string& why) -> void {
        throw std::runtime_error("corrupt checkpoint " + context + ": " + why);
    };

    std::string word;
    std::string version;
    in >> word >> version;
    if (!in || word != "finlstm-checkpoint" || version != "1") fail("bad header");

    Checkpoint ckpt;
    std::string scheme_str;
    std::size_t hidden = 0, features = 0;
    in >> word >> scheme_str;
    if (!in || word != "scheme") fail("missing scheme");
    ckpt.scheme = scheme_from_name(scheme_str);
    in >> word >> hidden;
    if (!in || word != "hidden" || hidden == 0) fail("missing hidden size");
    in >> word >> features;
    if (!in || word != "features" || features == 0) fail("missing feature count");
    in >> word >> ckpt.seed;
    if (!in || word != "seed") fail("missing seed");

    ckpt.params = LstmParameters(hidden, features);
    for (auto& block : parameter_blocks(ckpt.params)) {
        std::string name;
        std::size_t count = 0;
        in >> word >> name >> count;
        if (!in || word != "block" || name != block.name) fail("unexpected block order");
        if (count != block.values.size()) fail("block " + name + " has wrong size");
        for (double& v : block.values) {
            std::string token;
            in >> token;
            if (!in) fail("truncated block " + name);
            char* endp = nullptr;
            v = std::strtod(token.c_str(), &endp);
            if (endp == token.c_str() || *endp != '\0') fail("bad value in block " + name);
        }
    }
    in >> word;
    if (!in || word != "end") fail("missing end marker");
    return ckpt;
}

inline void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write checkpoint file " + path);
    out << serialize_checkpoint(ckpt);
    if (!out) throw std::runtime_error("failed writing checkpoint file " + path);
}

inline Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open checkpoint file " + path);
    return parse_checkpoint(in, path);
}

} // namespace finlstm::nn
