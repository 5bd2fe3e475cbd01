#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace mirage::rulelang {

using MetaValue = std::variant<std::string, double, bool>;

struct PatternDef {
    std::string id;                  // without the leading '$'
    std::vector<std::uint8_t> text;  // non-empty
    bool nocase = false;
    bool wide = false;
    bool ascii = false;  // explicit modifier; implied when no encoding modifier given

    bool matches_ascii() const { return ascii || !wide; }
    bool matches_wide() const { return wide; }
};

enum class CmpOp { Lt, Le, Gt, Ge };

struct Condition {
    enum class Kind {
        PatternRef,   // pattern_id
        And,          // children (n-ary)
        Or,           // children (n-ary)
        Not,          // children[0]
        CountOf,      // count, set
        AnyOf,        // set
        AllOf,        // set
        Import,       // dll, function
        EntropyCmp,   // cmp, threshold
        Unsigned,
    };

    Kind kind = Kind::PatternRef;
    std::string pattern_id;
    std::vector<Condition> children;
    int count = 0;
    bool set_is_them = false;
    std::vector<std::string> set_ids;
    std::string dll;
    std::string function;
    CmpOp cmp = CmpOp::Lt;
    double threshold = 0.0;
};

struct Rule {
    std::string name;
    std::vector<std::pair<std::string, MetaValue>> meta;
    std::vector<PatternDef> strings;
    Condition condition;
};

struct RuleSet {
    std::vector<Rule> rules;
};

}  // namespace mirage::rulelang
