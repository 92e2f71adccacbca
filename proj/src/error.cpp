#include "adl/error.hpp"

namespace adl {

ParseError::ParseError(std::size_t line, const std::string& what)
    : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

SensorUnavailableError::SensorUnavailableError(std::string sensor, std::string stage)
    : Error((stage.empty() ? std::string{} : "stage " + stage + ": ") + "sensor '" + sensor +
            "' is not available"),
      sensor_(std::move(sensor)),
      stage_(std::move(stage)) {}

DivergenceError::DivergenceError(std::size_t iteration, double loss)
    : Error("training diverged at iteration " + std::to_string(iteration) +
            " (loss = " + std::to_string(loss) + ")"),
      iteration_(iteration) {}

}  // namespace adl
