#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace ccfuse {

using VectorFn = std::function<double(const std::vector<double>&)>;

// Parsed arithmetic expression over p1..pk: numbers, + - * /, unary minus,
// parentheses. Variables are 1-based in the text and 0-based in evaluation.
class FocusExpression {
public:
    // Throws InvalidArgument naming the offending position.
    static FocusExpression parse(const std::string& text, std::size_t sources);

    double operator()(const std::vector<double>& p) const;
    const std::string& text() const { return text_; }
    // Indices of the variables that occur in the expression.
    const std::vector<std::size_t>& variables() const { return variables_; }

    struct Node;

private:
    std::string text_;
    std::shared_ptr<const Node> root_;
    std::vector<std::size_t> variables_;
};

// Joint parameter θ of dimension d, a focus φ(θ) and, per source j, the
// coordinate of θ that source reads. The profile at φ0 maximises Σ ℓ_j over
// {θ : φ(θ) = φ0}; the constraint is used to eliminate the pivot
// coordinate, either by `solve_pivot` or by a numeric root search.
struct FocusMap {
    std::size_t dimension = 1;
    VectorFn focus;
    std::vector<std::size_t> source_coord;
    // φ = ψ_1 = … = ψ_k: profiling reduces to a pointwise sum.
    bool common = false;
    std::size_t pivot = 0;
    // Optional closed form θ_pivot(θ, φ0); nullopt means no solution.
    std::function<std::optional<double>(const std::vector<double>&, double)> solve_pivot;

    void validate(std::size_t sources) const;

    static FocusMap common_parameter(std::size_t sources);
    // One coordinate per source, focus given by an expression over p1..pk.
    static FocusMap expression(const std::string& text, std::size_t sources);
};

}  // namespace ccfuse
