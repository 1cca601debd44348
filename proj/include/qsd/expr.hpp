#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace qsd {

/// Parse failure with the byte offset of the offending token.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, std::size_t offset)
        : std::runtime_error(msg + " at offset " + std::to_string(offset)), offset_(offset) {}
    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

namespace expr {

enum class NodeKind : std::uint8_t { Constant, Variable, Negate, Add, Sub, Mul, Div, Pow, Call };
enum class Func : std::uint8_t { Exp, Log, Sin, Cos, Sqrt };

struct Node {
    NodeKind kind;
    double value = 0.0;  // Constant
    Func func = Func::Exp;
    std::unique_ptr<Node> lhs;  // also the unary / call operand
    std::unique_ptr<Node> rhs;
};

/// Flat instruction stream for fast repeated evaluation.
struct Instr {
    enum class Op : std::uint8_t {
        PushConst, PushX, Add, Sub, Mul, Div, Pow, PowInt, Neg, Exp, Log, Sin, Cos, Sqrt
    };
    Op op;
    double value = 0.0;  // PushConst payload
    int ipow = 0;        // PowInt payload
};

class Program {
public:
    Program() = default;
    explicit Program(std::vector<Instr> code, int depth) : code_(std::move(code)), depth_(depth) {}

    double eval(double x) const;
    bool empty() const { return code_.empty(); }

private:
    std::vector<Instr> code_;
    int depth_ = 0;
};

/// Parsed expression in one variable `x`, with operators + - * / ^ (right
/// associative), unary minus, and the functions exp, log, sin, cos, sqrt.
class Ast {
public:
    Ast() = default;
    explicit Ast(std::shared_ptr<const Node> root) : root_(std::move(root)) {}

    bool valid() const { return root_ != nullptr; }
    double eval(double x) const;
    Program compile() const;
    std::string pretty() const;  // re-parses to an identical tree

private:
    std::shared_ptr<const Node> root_;
};

Ast parse(const std::string& text);

}  // namespace expr
}  // namespace qsd
