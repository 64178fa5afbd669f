#ifndef ERGM_CONFIG_HPP
#define ERGM_CONFIG_HPP

#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ergm/model.hpp"

namespace ergm {

/// `term <kind> [key=value ...] theta=<k>`; theta is stored 0-based.
struct TermDecl {
    std::string kind;
    std::map<std::string, std::string> args;
    int theta = 0;
    friend bool operator==(const TermDecl&, const TermDecl&) = default;
};

struct GwespDecl {
    int base = 0;
    int decay = 1;
    int shift1 = -1;
    int shift2 = -1;
    friend bool operator==(const GwespDecl&, const GwespDecl&) = default;
};

struct OffsetDecl {
    std::string kind = "sparse";
    friend bool operator==(const OffsetDecl&, const OffsetDecl&) = default;
};

using Declaration = std::variant<TermDecl, GwespDecl, OffsetDecl>;

/// A model independent of the node set; instantiate() binds it to n nodes.
struct ModelConfig {
    std::vector<Declaration> decls;
    std::map<int, std::string> names;  // optional parameter labels, 0-based

    int param_dim() const;
    ModelSpec instantiate(int n, const NodeAttributes& attrs = {}) const;
    /// Text that parses back to an equal config (presets come back expanded).
    std::string to_text() const;
    friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

/// Lines: `term ...`, `gwesp base=.. decay=.. [shift1=.. shift2=..]`,
/// `offset kind=sparse`, `name theta=<k> label=<s>`, `preset brain13`.
/// Theta indices are 1-based in the text. '#' starts a comment.
ModelConfig parse_model_config(std::string_view text);

/// Edges, degree counts 0..6, two-paths, and GWESP with shifts on the first
/// two shared-partner bins: 13 parameters.
ModelConfig preset_brain13();

}  // namespace ergm

#endif  // ERGM_CONFIG_HPP
