#pragma once

#include <stdexcept>
#include <string>

namespace phls {

struct PositionOutOfArea : std::out_of_range {
    explicit PositionOutOfArea(const std::string& what) : std::out_of_range(what) {}
};

struct LevelOutOfRange : std::out_of_range {
    explicit LevelOutOfRange(const std::string& what) : std::out_of_range(what) {}
};

struct EmptyRegion : std::invalid_argument {
    explicit EmptyRegion(const std::string& what) : std::invalid_argument(what) {}
};

struct AlphaOutOfRange : std::invalid_argument {
    explicit AlphaOutOfRange(const std::string& what) : std::invalid_argument(what) {}
};

struct NegativeElapsed : std::invalid_argument {
    explicit NegativeElapsed(const std::string& what) : std::invalid_argument(what) {}
};

struct NonPositiveR : std::invalid_argument {
    explicit NonPositiveR(const std::string& what) : std::invalid_argument(what) {}
};

struct UnknownNode : std::invalid_argument {
    explicit UnknownNode(const std::string& what) : std::invalid_argument(what) {}
};

struct InvalidConfig : std::invalid_argument {
    explicit InvalidConfig(const std::string& what) : std::invalid_argument(what) {}
};

struct IoFailure : std::runtime_error {
    explicit IoFailure(const std::string& what) : std::runtime_error(what) {}
};

struct EmptyTable : std::invalid_argument {
    explicit EmptyTable(const std::string& what) : std::invalid_argument(what) {}
};

} // namespace phls
