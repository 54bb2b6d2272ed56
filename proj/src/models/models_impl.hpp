#pragma once

#include <memory>

#include "bayesbench/models.hpp"

namespace bayesbench::detail {

std::unique_ptr<Model> make_binomial(const ModelInput& input, const PriorOptions& priors);
std::unique_ptr<Model> make_relative_improvement(const ModelInput& input, const PriorOptions& priors);
std::unique_ptr<Model> make_bradley_terry(const ModelInput& input, const PriorOptions& priors);
std::unique_ptr<Model> make_davidson(const ModelInput& input, const PriorOptions& priors);
std::unique_ptr<Model> make_cox(const ModelInput& input, const PriorOptions& priors);
std::unique_ptr<Model> make_student_t(const ModelInput& input, const PriorOptions& priors);

}  // namespace bayesbench::detail
