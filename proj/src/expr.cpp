#include "qsd/expr.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace qsd {
namespace expr {

namespace {

enum class Tok : std::uint8_t { Num, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };

struct Token {
    Tok kind;
    double num = 0.0;
    std::string ident;
    std::size_t pos = 0;
};

class Lexer {
public:
    explicit Lexer(const std::string& text) : text_(text) { advance(); }

    const Token& peek() const { return tok_; }
    Token take() {
        Token t = tok_;
        advance();
        return t;
    }

private:
    void advance() {
        while (i_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[i_]))) ++i_;
        tok_.pos = i_;
        if (i_ >= text_.size()) {
            tok_.kind = Tok::End;
            return;
        }
        char c = text_[i_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            const char* begin = text_.c_str() + i_;
            char* end = nullptr;
            double v = std::strtod(begin, &end);
            if (end == begin) throw ParseError("malformed number", i_);
            tok_.kind = Tok::Num;
            tok_.num = v;
            i_ += static_cast<std::size_t>(end - begin);
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i_;
            while (j < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[j])) || text_[j] == '_'))
                ++j;
            tok_.kind = Tok::Ident;
            tok_.ident = text_.substr(i_, j - i_);
            i_ = j;
            return;
        }
        switch (c) {
            case '+': tok_.kind = Tok::Plus; break;
            case '-': tok_.kind = Tok::Minus; break;
            case '*': tok_.kind = Tok::Star; break;
            case '/': tok_.kind = Tok::Slash; break;
            case '^': tok_.kind = Tok::Caret; break;
            case '(': tok_.kind = Tok::LParen; break;
            case ')': tok_.kind = Tok::RParen; break;
            default: throw ParseError(std::string("unexpected character '") + c + "'", i_);
        }
        ++i_;
    }

    const std::string& text_;
    std::size_t i_ = 0;
    Token tok_;
};

std::unique_ptr<Node> make(NodeKind k) {
    auto n = std::make_unique<Node>();
    n->kind = k;
    return n;
}

bool lookup_func(const std::string& name, Func& out) {
    if (name == "exp") out = Func::Exp;
    else if (name == "log") out = Func::Log;
    else if (name == "sin") out = Func::Sin;
    else if (name == "cos") out = Func::Cos;
    else if (name == "sqrt") out = Func::Sqrt;
    else return false;
    return true;
}

class Parser {
public:
    explicit Parser(const std::string& text) : lex_(text) {}

    std::unique_ptr<Node> parse() {
        auto e = parse_expr();
        if (lex_.peek().kind != Tok::End)
            throw ParseError("syntax error: trailing input", lex_.peek().pos);
        return e;
    }

private:
    std::unique_ptr<Node> parse_expr() {
        guard_depth();
        auto lhs = parse_term();
        while (lex_.peek().kind == Tok::Plus || lex_.peek().kind == Tok::Minus) {
            Tok op = lex_.take().kind;
            auto rhs = parse_term();
            auto n = make(op == Tok::Plus ? NodeKind::Add : NodeKind::Sub);
            n->lhs = std::move(lhs);
            n->rhs = std::move(rhs);
            lhs = std::move(n);
        }
        --depth_;
        return lhs;
    }

    std::unique_ptr<Node> parse_term() {
        guard_depth();
        auto lhs = parse_unary();
        while (lex_.peek().kind == Tok::Star || lex_.peek().kind == Tok::Slash) {
            Tok op = lex_.take().kind;
            auto rhs = parse_unary();
            auto n = make(op == Tok::Star ? NodeKind::Mul : NodeKind::Div);
            n->lhs = std::move(lhs);
            n->rhs = std::move(rhs);
            lhs = std::move(n);
        }
        --depth_;
        return lhs;
    }

    std::unique_ptr<Node> parse_unary() {
        guard_depth();
        std::unique_ptr<Node> r;
        if (lex_.peek().kind == Tok::Minus) {
            lex_.take();
            auto n = make(NodeKind::Negate);
            n->lhs = parse_unary();
            r = std::move(n);
        } else {
            r = parse_power();
        }
        --depth_;
        return r;
    }

    std::unique_ptr<Node> parse_power() {
        guard_depth();
        auto base = parse_primary();
        if (lex_.peek().kind == Tok::Caret) {
            lex_.take();
            auto n = make(NodeKind::Pow);
            n->lhs = std::move(base);
            n->rhs = parse_unary();  // right associative, allows x^-2
            base = std::move(n);
        }
        --depth_;
        return base;
    }

    std::unique_ptr<Node> parse_primary() {
        Token t = lex_.take();
        switch (t.kind) {
            case Tok::Num: {
                auto n = make(NodeKind::Constant);
                n->value = t.num;
                return n;
            }
            case Tok::Ident: {
                if (t.ident == "x") {
                    if (lex_.peek().kind == Tok::LParen)
                        throw ParseError("arity mismatch: 'x' is not a function", t.pos);
                    return make(NodeKind::Variable);
                }
                Func f;
                if (!lookup_func(t.ident, f))
                    throw ParseError("unknown identifier '" + t.ident + "'", t.pos);
                if (lex_.peek().kind != Tok::LParen)
                    throw ParseError("arity mismatch: '" + t.ident + "' expects one argument",
                                     t.pos);
                lex_.take();
                auto arg = parse_expr();
                if (lex_.peek().kind != Tok::RParen)
                    throw ParseError("syntax error: expected ')'", lex_.peek().pos);
                lex_.take();
                auto n = make(NodeKind::Call);
                n->func = f;
                n->lhs = std::move(arg);
                return n;
            }
            case Tok::LParen: {
                auto e = parse_expr();
                if (lex_.peek().kind != Tok::RParen)
                    throw ParseError("syntax error: expected ')'", lex_.peek().pos);
                lex_.take();
                return e;
            }
            default: throw ParseError("syntax error: expected operand", t.pos);
        }
    }

    void guard_depth() {
        if (++depth_ > 200) throw ParseError("expression too deeply nested", lex_.peek().pos);
    }

    Lexer lex_;
    int depth_ = 0;
};

double eval_node(const Node& n, double x) {
    switch (n.kind) {
        case NodeKind::Constant: return n.value;
        case NodeKind::Variable: return x;
        case NodeKind::Negate: return -eval_node(*n.lhs, x);
        case NodeKind::Add: return eval_node(*n.lhs, x) + eval_node(*n.rhs, x);
        case NodeKind::Sub: return eval_node(*n.lhs, x) - eval_node(*n.rhs, x);
        case NodeKind::Mul: return eval_node(*n.lhs, x) * eval_node(*n.rhs, x);
        case NodeKind::Div: return eval_node(*n.lhs, x) / eval_node(*n.rhs, x);
        case NodeKind::Pow: return std::pow(eval_node(*n.lhs, x), eval_node(*n.rhs, x));
        case NodeKind::Call: {
            double a = eval_node(*n.lhs, x);
            switch (n.func) {
                case Func::Exp: return std::exp(a);
                case Func::Log: return std::log(a);
                case Func::Sin: return std::sin(a);
                case Func::Cos: return std::cos(a);
                case Func::Sqrt: return std::sqrt(a);
            }
        }
    }
    return 0.0;  // unreachable
}

int prec(NodeKind k) {
    switch (k) {
        case NodeKind::Add:
        case NodeKind::Sub: return 1;
        case NodeKind::Mul:
        case NodeKind::Div: return 2;
        case NodeKind::Negate: return 3;
        case NodeKind::Pow: return 4;
        default: return 5;
    }
}

void print_node(const Node& n, std::string& out);

void print_child(const Node& child, int parent_prec, bool needs_paren_on_tie, std::string& out) {
    bool paren = prec(child.kind) < parent_prec ||
                 (needs_paren_on_tie && prec(child.kind) == parent_prec);
    if (paren) out += '(';
    print_node(child, out);
    if (paren) out += ')';
}

void print_node(const Node& n, std::string& out) {
    char buf[40];
    switch (n.kind) {
        case NodeKind::Constant:
            if (n.value < 0) {
                std::snprintf(buf, sizeof buf, "(%.17g)", n.value);
            } else {
                std::snprintf(buf, sizeof buf, "%.17g", n.value);
            }
            out += buf;
            break;
        case NodeKind::Variable: out += 'x'; break;
        case NodeKind::Negate:
            out += '-';
            print_child(*n.lhs, prec(NodeKind::Negate), false, out);
            break;
        case NodeKind::Add:
            print_child(*n.lhs, 1, false, out);
            out += " + ";
            print_child(*n.rhs, 1, true, out);
            break;
        case NodeKind::Sub:
            print_child(*n.lhs, 1, false, out);
            out += " - ";
            print_child(*n.rhs, 1, true, out);
            break;
        case NodeKind::Mul:
            print_child(*n.lhs, 2, false, out);
            out += "*";
            print_child(*n.rhs, 2, true, out);
            break;
        case NodeKind::Div:
            print_child(*n.lhs, 2, false, out);
            out += "/";
            print_child(*n.rhs, 2, true, out);
            break;
        case NodeKind::Pow:
            print_child(*n.lhs, 4, true, out);  // (a^b)^c keeps its parens
            out += "^";
            print_child(*n.rhs, 4, false, out);
            break;
        case NodeKind::Call:
            switch (n.func) {
                case Func::Exp: out += "exp("; break;
                case Func::Log: out += "log("; break;
                case Func::Sin: out += "sin("; break;
                case Func::Cos: out += "cos("; break;
                case Func::Sqrt: out += "sqrt("; break;
            }
            print_node(*n.lhs, out);
            out += ')';
            break;
    }
}

void compile_node(const Node& n, std::vector<Instr>& code, int& depth, int& max_depth) {
    auto emit = [&](Instr ins, int stack_change) {
        code.push_back(ins);
        depth += stack_change;
        if (depth > max_depth) max_depth = depth;
    };
    switch (n.kind) {
        case NodeKind::Constant: emit({Instr::Op::PushConst, n.value, 0}, +1); break;
        case NodeKind::Variable: emit({Instr::Op::PushX, 0.0, 0}, +1); break;
        case NodeKind::Negate:
            compile_node(*n.lhs, code, depth, max_depth);
            emit({Instr::Op::Neg, 0.0, 0}, 0);
            break;
        case NodeKind::Add:
        case NodeKind::Sub:
        case NodeKind::Mul:
        case NodeKind::Div: {
            compile_node(*n.lhs, code, depth, max_depth);
            compile_node(*n.rhs, code, depth, max_depth);
            Instr::Op op = n.kind == NodeKind::Add   ? Instr::Op::Add
                           : n.kind == NodeKind::Sub ? Instr::Op::Sub
                           : n.kind == NodeKind::Mul ? Instr::Op::Mul
                                                     : Instr::Op::Div;
            emit({op, 0.0, 0}, -1);
            break;
        }
        case NodeKind::Pow: {
            compile_node(*n.lhs, code, depth, max_depth);
            // small positive integer exponents get the multiply fast path
            if (n.rhs->kind == NodeKind::Constant) {
                double e = n.rhs->value;
                if (e == std::floor(e) && e >= 2 && e <= 16) {
                    emit({Instr::Op::PowInt, 0.0, static_cast<int>(e)}, 0);
                    break;
                }
            }
            compile_node(*n.rhs, code, depth, max_depth);
            emit({Instr::Op::Pow, 0.0, 0}, -1);
            break;
        }
        case NodeKind::Call: {
            compile_node(*n.lhs, code, depth, max_depth);
            Instr::Op op = Instr::Op::Exp;
            switch (n.func) {
                case Func::Exp: op = Instr::Op::Exp; break;
                case Func::Log: op = Instr::Op::Log; break;
                case Func::Sin: op = Instr::Op::Sin; break;
                case Func::Cos: op = Instr::Op::Cos; break;
                case Func::Sqrt: op = Instr::Op::Sqrt; break;
            }
            emit({op, 0.0, 0}, 0);
            break;
        }
    }
}

}  // namespace

double Program::eval(double x) const {
    double stack[64];
    double* sp = stack;
    for (const Instr& ins : code_) {
        switch (ins.op) {
            case Instr::Op::PushConst: *sp++ = ins.value; break;
            case Instr::Op::PushX: *sp++ = x; break;
            case Instr::Op::Add: sp[-2] += sp[-1]; --sp; break;
            case Instr::Op::Sub: sp[-2] -= sp[-1]; --sp; break;
            case Instr::Op::Mul: sp[-2] *= sp[-1]; --sp; break;
            case Instr::Op::Div: sp[-2] /= sp[-1]; --sp; break;
            case Instr::Op::Pow: sp[-2] = std::pow(sp[-2], sp[-1]); --sp; break;
            case Instr::Op::PowInt: {
                double b = sp[-1], r = b;
                for (int i = 1; i < ins.ipow; ++i) r *= b;
                sp[-1] = r;
                break;
            }
            case Instr::Op::Neg: sp[-1] = -sp[-1]; break;
            case Instr::Op::Exp: sp[-1] = std::exp(sp[-1]); break;
            case Instr::Op::Log: sp[-1] = std::log(sp[-1]); break;
            case Instr::Op::Sin: sp[-1] = std::sin(sp[-1]); break;
            case Instr::Op::Cos: sp[-1] = std::cos(sp[-1]); break;
            case Instr::Op::Sqrt: sp[-1] = std::sqrt(sp[-1]); break;
        }
    }
    return sp[-1];
}

double Ast::eval(double x) const { return eval_node(*root_, x); }

Program Ast::compile() const {
    std::vector<Instr> code;
    int depth = 0, max_depth = 0;
    compile_node(*root_, code, depth, max_depth);
    if (max_depth > 63) throw std::runtime_error("expression stack too deep to compile");
    return Program(std::move(code), max_depth);
}

std::string Ast::pretty() const {
    std::string out;
    print_node(*root_, out);
    return out;
}

Ast parse(const std::string& text) {
    if (text.empty()) throw ParseError("empty expression", 0);
    Parser p(text);
    return Ast(std::shared_ptr<const Node>(p.parse().release()));
}

}  // namespace expr
}  // namespace qsd
