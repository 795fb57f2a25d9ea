#include "phamp/acceptance.hpp"

#include <cstdlib>
#include <iostream>

int main(int argc, char** argv)
{
    phamp::AcceptanceOptions opt;
    opt.log = &std::cout;
    for (int i = 1; i < argc; ++i)
        opt.only.push_back(std::atoi(argv[i]));
    // the log already carries one summary line per criterion
    bool ok = true;
    for (const auto& r : phamp::run_acceptance(opt))
        ok = ok && r.pass;
    return ok ? 0 : 1;
}
