#include <stdio.h>
#include <string.h>

#include "coded_caching.h"

int main(void) {
    double r = 0.0;
    if (cc_peak_rate(1.0, 2, 2.0, &r) != CC_STATUS_OK || r != 0.75) {
        return 1;
    }
    CcProfile *p = NULL;
    if (cc_profile_zipf(500, 0.5, &p) != CC_STATUS_OK) {
        return 2;
    }
    CcGrouping *g = NULL;
    if (cc_grouping_factor_two(p, &g) != CC_STATUS_OK || cc_grouping_num_groups(g) != 5) {
        return 3;
    }
    CcAllocation *a = NULL;
    if (cc_allocation_optimize(g, 20.0, 10, CC_STRATEGY_UNIFORM, &a) != CC_STATUS_OK) {
        return 4;
    }
    double exact = 0.0;
    if (cc_grouped_expected_rate_exact(g, a, 10, &exact) != CC_STATUS_OK || !(exact > 0.0)) {
        return 5;
    }
    if (cc_peak_rate(-1.0, 2, 2.0, &r) != CC_STATUS_INVALID_ARGUMENT ||
        strlen(cc_last_error_message()) == 0) {
        return 6;
    }
    cc_allocation_free(a);
    cc_grouping_free(g);
    cc_profile_free(p);
    printf("ok %.6f\n", exact);
    return 0;
}
