#include "swgrowth/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace swgrowth {

struct SequenceExpr::Node {
    enum class Kind { Constant, Variable, Add, Sub, Mul, Div, Pow, Neg, Log, Sqrt, Exp };
    Kind kind = Kind::Constant;
    double value = 0.0;
    std::shared_ptr<const Node> lhs;
    std::shared_ptr<const Node> rhs;

    double eval(double t) const {
        switch (kind) {
            case Kind::Constant: return value;
            case Kind::Variable: return t;
            case Kind::Add: return lhs->eval(t) + rhs->eval(t);
            case Kind::Sub: return lhs->eval(t) - rhs->eval(t);
            case Kind::Mul: return lhs->eval(t) * rhs->eval(t);
            case Kind::Div: return lhs->eval(t) / rhs->eval(t);
            case Kind::Pow: return std::pow(lhs->eval(t), rhs->eval(t));
            case Kind::Neg: return -lhs->eval(t);
            case Kind::Log: return std::log(lhs->eval(t));
            case Kind::Sqrt: return std::sqrt(lhs->eval(t));
            case Kind::Exp: return std::exp(lhs->eval(t));
        }
        return 0.0;
    }
};

namespace {

using Node = SequenceExpr::Node;
using NodePtr = std::shared_ptr<const Node>;

NodePtr make(Node::Kind kind, NodePtr lhs = nullptr, NodePtr rhs = nullptr, double value = 0.0) {
    auto n = std::make_shared<Node>();
    n->kind = kind;
    n->lhs = std::move(lhs);
    n->rhs = std::move(rhs);
    n->value = value;
    return n;
}

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    NodePtr parse() {
        NodePtr root = expression();
        skip_space();
        if (pos_ != text_.size()) fail("unexpected character");
        return root;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw std::invalid_argument("sequence expression '" + std::string(text_) + "': " + what +
                                    " at position " + std::to_string(pos_));
    }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr expression() {
        NodePtr lhs = term();
        for (;;) {
            if (accept('+')) {
                lhs = make(Node::Kind::Add, lhs, term());
            } else if (accept('-')) {
                lhs = make(Node::Kind::Sub, lhs, term());
            } else {
                return lhs;
            }
        }
    }

    NodePtr term() {
        NodePtr lhs = unary();
        for (;;) {
            if (accept('*')) {
                lhs = make(Node::Kind::Mul, lhs, unary());
            } else if (accept('/')) {
                lhs = make(Node::Kind::Div, lhs, unary());
            } else {
                return lhs;
            }
        }
    }

    NodePtr unary() {
        if (accept('-')) return make(Node::Kind::Neg, unary());
        if (accept('+')) return unary();
        NodePtr base = primary();
        if (accept('^')) return make(Node::Kind::Pow, base, unary());
        return base;
    }

    NodePtr primary() {
        skip_space();
        if (pos_ >= text_.size()) fail("unexpected end of input");
        const char c = text_[pos_];
        if (accept('(')) {
            NodePtr inner = expression();
            if (!accept(')')) fail("expected ')'");
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            double value = 0.0;
            const char* begin = text_.data() + pos_;
            const auto [end, ec] = std::from_chars(begin, text_.data() + text_.size(), value);
            if (ec != std::errc()) fail("malformed number");
            pos_ += static_cast<std::size_t>(end - begin);
            return make(Node::Kind::Constant, nullptr, nullptr, value);
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            const std::size_t start = pos_;
            while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            const std::string_view name = text_.substr(start, pos_ - start);
            if (name == "t") return make(Node::Kind::Variable);
            if (name == "pi") return make(Node::Kind::Constant, nullptr, nullptr, std::numbers::pi);
            if (name == "e") return make(Node::Kind::Constant, nullptr, nullptr, std::numbers::e);
            Node::Kind fn;
            if (name == "log") {
                fn = Node::Kind::Log;
            } else if (name == "sqrt") {
                fn = Node::Kind::Sqrt;
            } else if (name == "exp") {
                fn = Node::Kind::Exp;
            } else {
                pos_ = start;
                fail("unknown identifier '" + std::string(name) + "'");
            }
            if (!accept('(')) fail("expected '(' after function name");
            NodePtr arg = expression();
            if (!accept(')')) fail("expected ')'");
            return make(fn, arg);
        }
        fail(std::string("unexpected character '") + c + "'");
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

}  // namespace

SequenceExpr SequenceExpr::parse(std::string_view text) {
    SequenceExpr e;
    e.source_ = std::string(text);
    e.root_ = Parser(text).parse();
    return e;
}

double SequenceExpr::operator()(double t) const { return root_->eval(t); }

}  // namespace swgrowth
