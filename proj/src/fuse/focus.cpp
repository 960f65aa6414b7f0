#include "ccfuse/fuse/focus.hpp"

#include "ccfuse/error.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <sstream>

namespace ccfuse {

struct FocusExpression::Node {
    char op = 0;  // 'n' number, 'v' variable, '~' negation, or + - * /
    double number = 0.0;
    std::size_t variable = 0;
    std::shared_ptr<const Node> lhs, rhs;

    double eval(const std::vector<double>& p) const {
        switch (op) {
            case 'n': return number;
            case 'v': return p[variable];
            case '~': return -lhs->eval(p);
            case '+': return lhs->eval(p) + rhs->eval(p);
            case '-': return lhs->eval(p) - rhs->eval(p);
            case '*': return lhs->eval(p) * rhs->eval(p);
            default: return lhs->eval(p) / rhs->eval(p);
        }
    }
};

namespace {

using NodePtr = std::shared_ptr<const FocusExpression::Node>;

class Parser {
public:
    Parser(const std::string& text, std::size_t sources) : s_(text), k_(sources) {}

    NodePtr parse() {
        auto n = sum();
        skip();
        if (pos_ != s_.size()) fail("unexpected character");
        return n;
    }

    std::vector<std::size_t> used;

private:
    const std::string& s_;
    std::size_t k_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const char* what) const {
        std::ostringstream os;
        os << "focus expression '" << s_ << "': " << what << " at position " << pos_ + 1;
        throw InvalidArgument(os.str());
    }

    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    static NodePtr binary(char op, NodePtr a, NodePtr b) {
        auto n = std::make_shared<FocusExpression::Node>();
        n->op = op;
        n->lhs = std::move(a);
        n->rhs = std::move(b);
        return n;
    }

    NodePtr sum() {
        auto n = product();
        for (;;) {
            skip();
            if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) {
                const char op = s_[pos_++];
                n = binary(op, n, product());
            } else {
                return n;
            }
        }
    }

    NodePtr product() {
        auto n = unary();
        for (;;) {
            skip();
            if (pos_ < s_.size() && (s_[pos_] == '*' || s_[pos_] == '/')) {
                const char op = s_[pos_++];
                n = binary(op, n, unary());
            } else {
                return n;
            }
        }
    }

    NodePtr unary() {
        skip();
        if (pos_ < s_.size() && s_[pos_] == '-') {
            ++pos_;
            auto n = std::make_shared<FocusExpression::Node>();
            n->op = '~';
            n->lhs = unary();
            return n;
        }
        if (pos_ < s_.size() && s_[pos_] == '+') {
            ++pos_;
            return unary();
        }
        return atom();
    }

    NodePtr atom() {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end");
        const char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            auto n = sum();
            skip();
            if (pos_ >= s_.size() || s_[pos_] != ')') fail("missing ')'");
            ++pos_;
            return n;
        }
        if (c == 'p' || c == 'P') {
            ++pos_;
            const std::size_t start = pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            if (start == pos_) fail("expected source index after 'p'");
            const unsigned long idx = std::stoul(s_.substr(start, pos_ - start));
            if (idx < 1 || idx > k_) {
                pos_ = start;
                fail("source index out of range");
            }
            auto n = std::make_shared<FocusExpression::Node>();
            n->op = 'v';
            n->variable = idx - 1;
            used.push_back(idx - 1);
            return n;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            const char* begin = s_.c_str() + pos_;
            char* end = nullptr;
            const double v = std::strtod(begin, &end);
            if (end == begin) fail("bad number");
            pos_ += static_cast<std::size_t>(end - begin);
            auto n = std::make_shared<FocusExpression::Node>();
            n->op = 'n';
            n->number = v;
            return n;
        }
        fail("unexpected character");
    }
};

}  // namespace

FocusExpression FocusExpression::parse(const std::string& text, std::size_t sources) {
    Parser p(text, sources);
    FocusExpression e;
    e.root_ = p.parse();
    e.text_ = text;
    e.variables_ = p.used;
    std::sort(e.variables_.begin(), e.variables_.end());
    e.variables_.erase(std::unique(e.variables_.begin(), e.variables_.end()), e.variables_.end());
    return e;
}

double FocusExpression::operator()(const std::vector<double>& p) const { return root_->eval(p); }

void FocusMap::validate(std::size_t sources) const {
    if (dimension < 1) throw InvalidArgument("FocusMap: dimension must be positive");
    if (!common && !focus) throw InvalidArgument("FocusMap: focus function missing");
    if (source_coord.size() != sources) {
        std::ostringstream os;
        os << "FocusMap: " << source_coord.size() << " source selectors for " << sources << " sources";
        throw InvalidArgument(os.str());
    }
    std::vector<bool> read(dimension, false);
    for (std::size_t c : source_coord) {
        if (c >= dimension) throw InvalidArgument("FocusMap: source selector out of range");
        read[c] = true;
    }
    if (std::find(read.begin(), read.end(), false) != read.end()) {
        throw InvalidArgument("FocusMap: every coordinate must be read by some source");
    }
    if (pivot >= dimension) throw InvalidArgument("FocusMap: pivot out of range");
}

FocusMap FocusMap::common_parameter(std::size_t sources) {
    FocusMap m;
    m.dimension = 1;
    m.common = true;
    m.focus = [](const std::vector<double>& p) { return p[0]; };
    m.source_coord.assign(sources, 0);
    m.solve_pivot = [](const std::vector<double>&, double phi) { return std::optional<double>(phi); };
    return m;
}

FocusMap FocusMap::expression(const std::string& text, std::size_t sources) {
    auto e = FocusExpression::parse(text, sources);
    if (e.variables().empty()) throw InvalidArgument("focus expression '" + text + "' uses no source parameter");
    FocusMap m;
    m.dimension = sources;
    m.focus = [e](const std::vector<double>& p) { return e(p); };
    for (std::size_t j = 0; j < sources; ++j) m.source_coord.push_back(j);
    m.pivot = e.variables().back();
    return m;
}

}  // namespace ccfuse
