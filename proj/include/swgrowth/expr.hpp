#pragma once

#include <memory>
#include <string>
#include <string_view>

namespace swgrowth {

/// A sequence written as an arithmetic expression in `t`, e.g. "1+log(t)" or
/// "t/(1+log(t))".
///
/// Grammar: + - * / ^ (right-associative), unary minus, parentheses, numbers,
/// the variable t, constants pi and e, and the functions log, sqrt, exp.
class SequenceExpr {
public:
    /// Throws std::invalid_argument with the offending position on parse errors.
    static SequenceExpr parse(std::string_view text);

    double operator()(double t) const;
    const std::string& source() const { return source_; }

    struct Node;

private:
    std::string source_;
    std::shared_ptr<const Node> root_;
};

}  // namespace swgrowth
