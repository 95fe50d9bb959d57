#include <doctest.h>

#include "properties.hpp"

TEST_CASE("module invariants hold on the corpus") {
    for (const auto& prop : properties::all()) {
        SUBCASE((prop.module + "/" + prop.name).c_str()) {
            properties::Result r{prop.module, prop.name, false, ""};
            try {
                r = prop.run();
            } catch (const std::exception& e) {
                r.detail = std::string("raised: ") + e.what();
            }
            INFO(r.detail);
            CHECK(r.pass);
        }
    }
}
