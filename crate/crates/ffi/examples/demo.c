#include <stdio.h>
#include <string.h>
#include "wardsim.h"

int main(void) {
    printf("wardsim %s\n", wardsim_version());

    WardsimFls *fls = NULL;
    if (wardsim_fls_load("crates/core/data/doctor.fls", &fls) != WARDSIM_STATUS_OK) {
        fprintf(stderr, "load failed: %s\n", wardsim_last_error());
        return 1;
    }
    const char *names[] = {"severity", "mentalState"};
    double values[] = {9.0, 0.2};
    double crisp = 0.0;
    if (wardsim_fls_infer(fls, names, values, 2, &crisp) != WARDSIM_STATUS_OK) {
        fprintf(stderr, "infer failed: %s\n", wardsim_last_error());
        return 1;
    }
    printf("treatDuration(9.0, 0.2) = %.2f minutes\n", crisp);
    wardsim_fls_free(fls);

    char *json = NULL;
    const char *config = "{\"patients\": 5, \"beds\": 4, \"duration_days\": 1}";
    if (wardsim_run_json(config, 42, &json) != WARDSIM_STATUS_OK) {
        fprintf(stderr, "run failed: %s\n", wardsim_last_error());
        return 1;
    }
    printf("run summary: %.120s...\n", json);
    wardsim_string_free(json);
    return 0;
}
