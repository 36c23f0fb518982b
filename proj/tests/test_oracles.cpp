#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracle_suite.hpp"

TEST_CASE("library matches the independent oracles")
{
    for (const OracleCheck& c : run_oracle_suite()) {
        INFO(c.name, ": discrepancy ", c.discrepancy, " tolerance ", c.tolerance);
        CHECK(c.pass());
    }
}
