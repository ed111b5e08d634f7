#pragma once

#include "matcha/llm_gateway.hpp"
#include "matcha/prompts.hpp"
#include "matcha/toolbox.hpp"

namespace matcha {

// What every LLM-backed agent needs: providers, the catalog tools, and prompts.
struct AgentContext {
    const Gateway& gateway;
    const Toolbox& toolbox;
    const PromptSet& prompts;

    const Catalog& catalog() const { return toolbox.catalog(); }
};

}  // namespace matcha
