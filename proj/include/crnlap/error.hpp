#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace crnlap {

enum class Errc {
    duplicate_vertex,
    unknown_endpoint,
    self_loop,
    duplicate_edge,
    non_positive_label,
    root_not_in_graph,
    bad_order,
    root_outside_component,
    invalid_aux_tree,
    not_strongly_connected_components,
    duplicate_complex,
    shape_mismatch,
    negative_complex_entry,
    non_integer_exponent,
    non_positive_state,
    not_weakly_reversible,
    not_a_cbe,
    no_convergence,
    dimension_too_large,
    point_not_in_stratum,
    step_size_underflow,
    schema_error,
    semantic_error,
    invalid_argument,
};

constexpr std::string_view errc_name(Errc code) noexcept
{
    switch (code) {
    case Errc::duplicate_vertex: return "DuplicateVertex";
    case Errc::unknown_endpoint: return "UnknownEndpoint";
    case Errc::self_loop: return "SelfLoop";
    case Errc::duplicate_edge: return "DuplicateEdge";
    case Errc::non_positive_label: return "NonPositiveLabel";
    case Errc::root_not_in_graph: return "RootNotInGraph";
    case Errc::bad_order: return "BadOrder";
    case Errc::root_outside_component: return "RootOutsideComponent";
    case Errc::invalid_aux_tree: return "InvalidAuxTree";
    case Errc::not_strongly_connected_components: return "NotStronglyConnectedComponents";
    case Errc::duplicate_complex: return "DuplicateComplex";
    case Errc::shape_mismatch: return "ShapeMismatch";
    case Errc::negative_complex_entry: return "NegativeComplexEntry";
    case Errc::non_integer_exponent: return "NonIntegerExponent";
    case Errc::non_positive_state: return "NonPositiveState";
    case Errc::not_weakly_reversible: return "NotWeaklyReversible";
    case Errc::not_a_cbe: return "NotACbe";
    case Errc::no_convergence: return "NoConvergence";
    case Errc::dimension_too_large: return "DimensionTooLarge";
    case Errc::point_not_in_stratum: return "PointNotInStratum";
    case Errc::step_size_underflow: return "StepSizeUnderflow";
    case Errc::schema_error: return "SchemaError";
    case Errc::semantic_error: return "SemanticError";
    case Errc::invalid_argument: return "InvalidArgument";
    }
    return "Unknown";
}

/// Every failure raised by the library. `path` locates the offending field
/// for document errors and is empty otherwise.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message, std::string path = {})
        : std::runtime_error(std::string(errc_name(code)) + ": " + message),
          code_(code), path_(std::move(path)), detail_(message)
    {}

    Errc code() const noexcept { return code_; }
    const std::string& path() const noexcept { return path_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    Errc code_;
    std::string path_;
    std::string detail_;
};

} // namespace crnlap
