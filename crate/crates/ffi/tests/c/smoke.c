#include <stdio.h>
#include <string.h>
#include "isogroup.h"

#define CHECK(cond)                                               \
    do {                                                          \
        if (!(cond)) {                                            \
            fprintf(stderr, "check failed: %s (line %d)\n", #cond, __LINE__); \
            return 1;                                             \
        }                                                         \
    } while (0)

int main(void) {
    const double orts[] = {1, 0, 0, 1, 1, 0, 0, 1};
    const double trans[] = {1, 0, 0, 1};
    IsogroupGroup *group = NULL;
    CHECK(isogroup_group_new(2, 2, orts, trans, 1e-9, &group) == ISOGROUP_STATUS_OK);
    CHECK(isogroup_group_dim(group) == 2);

    IsogroupBall *ball = NULL;
    CHECK(isogroup_ball_enumerate(group, 2.0, &ball) == ISOGROUP_STATUS_OK);
    CHECK(isogroup_ball_len(ball) == 13);
    size_t count = 0;
    CHECK(isogroup_ball_count_within(ball, 1.0, &count) == ISOGROUP_STATUS_OK);
    CHECK(count == 5);
    CHECK(isogroup_ball_count_within(ball, 5.0, &count) != ISOGROUP_STATUS_OK);
    CHECK(isogroup_last_error() != NULL);

    CHECK(isogroup_classify(5, 3, 1) == ISOGROUP_VERDICT_UNKNOWN);
    bool holds = false;
    CHECK(isogroup_condition_11(5, 2, 2, &holds) == ISOGROUP_STATUS_OK && holds);

    isogroup_ball_free(ball);
    isogroup_group_free(group);
    printf("ok %s\n", isogroup_version());
    return 0;
}
