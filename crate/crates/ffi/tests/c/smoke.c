#include <stdio.h>
#include <string.h>
#include "torsion_forge.h"

#define CHECK(cond) do { if (!(cond)) { fprintf(stderr, "failed: %s (%s)\n", #cond, tf_last_error() ? tf_last_error() : ""); return 1; } } while (0)

int main(void) {
    TfRankReport *r = NULL;
    char *s = NULL;
    CHECK(tf_rank_new(5, 3, 2, 0, &r) == TF_STATUS_OK);
    CHECK(tf_rank_is_exact(r));
    CHECK(tf_rank_value(r, &s) == TF_STATUS_OK);
    CHECK(strcmp(s, "156") == 0);
    tf_string_free(s);
    tf_rank_free(r);

    TfModel *m = NULL;
    TfDivisor *d = NULL, *n = NULL;
    CHECK(tf_model_new_artin_schreier(3, 2, 9, &m) == TF_STATUS_OK);
    CHECK(tf_divisor_random(m, 7, &d) == TF_STATUS_OK);
    CHECK(tf_divisor_scalar_mul(m, "4096", d, &n) == TF_STATUS_OK);
    CHECK(tf_divisor_is_identity(n));
    tf_divisor_free(n);
    tf_divisor_free(d);
    tf_model_free(m);

    const char *argv[] = {"count", "--p", "3", "--m", "1", "--s", "2"};
    int32_t code = -1;
    CHECK(tf_run(argv, 7, &s, &code) == TF_STATUS_OK && code == 0);
    CHECK(strstr(s, "\"16\"") != NULL);
    tf_string_free(s);
    puts("ok");
    return 0;
}
