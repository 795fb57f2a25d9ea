#pragma once

#include "phamp/pipeline.hpp"

#include <map>
#include <memory>
#include <string>

namespace fixture {

// One pipeline per model, solved on first use and shared by all tests in
// the binary.
inline phamp::Pipeline& model(const std::string& name)
{
    static std::map<std::string, std::unique_ptr<phamp::Pipeline>> cache;
    auto& p = cache[name];
    if (!p) {
        phamp::RunConfig c;
        c.model = name;
        p = std::make_unique<phamp::Pipeline>(c);
        p->map();
        p->domain();
    }
    return *p;
}

} // namespace fixture
