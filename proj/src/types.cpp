#include "selfrocket/types.hpp"

namespace selfrocket {

const char* pooling_op_name(PoolingOp op) {
    switch (op) {
    case PoolingOp::kPpv: return "PPV";
    case PoolingOp::kGmp: return "GMP";
    case PoolingOp::kMpv: return "MPV";
    case PoolingOp::kMipv: return "MIPV";
    case PoolingOp::kLspv: return "LSPV";
    }
    throw ConfigError("unknown pooling op");
}

std::string combo_name(ComboId id) {
    std::string s = pooling_op_name(id.po);
    switch (id.rep) {
    case Representation::kBase: break;
    case Representation::kDiff: s += "_DIFF"; break;
    case Representation::kMix: s += "_MIX"; break;
    }
    return s;
}

ComboId parse_combo(const std::string& name) {
    std::string upper = name;
    for (char& c : upper)
        if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
    for (int i = 0; i < kNumCombos; ++i) {
        const ComboId id = combo_at(i);
        if (combo_name(id) == upper) return id;
    }
    throw ConfigError("unknown combo name: '" + name + "' (expected e.g. PPV, GMP_DIFF, LSPV_MIX)");
}

} // namespace selfrocket
