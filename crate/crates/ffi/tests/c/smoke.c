/* Links against the static library: submit, review, read back. */
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "cdi_registry.h"

static char *slurp(const char *path) {
    FILE *f = fopen(path, "rb");
    if (!f) return NULL;
    fseek(f, 0, SEEK_END);
    long n = ftell(f);
    fseek(f, 0, SEEK_SET);
    char *buf = malloc((size_t)n + 1);
    if (fread(buf, 1, (size_t)n, f) != (size_t)n) {
        fclose(f);
        free(buf);
        return NULL;
    }
    buf[n] = '\0';
    fclose(f);
    return buf;
}

#define CHECK(call)                                                         \
    do {                                                                    \
        CdiStatus st_ = (call);                                             \
        if (st_ != CDI_STATUS_OK) {                                         \
            fprintf(stderr, "%s: %s (%s)\n", #call, cdi_status_name(st_),   \
                    cdi_last_error() ? cdi_last_error() : "");              \
            return 1;                                                       \
        }                                                                   \
    } while (0)

int main(int argc, char **argv) {
    if (argc < 2) return 2;
    char *record = slurp(argv[1]);
    if (!record) return 2;

    printf("words=%lld\n", (long long)cdi_count_words("a b c d"));

    char *report = NULL;
    CHECK(cdi_validate(record, &report));
    cdi_string_free(report);

    CdiStore *store = cdi_store_open_in_memory();
    char *id = NULL;
    char *state = NULL;
    CHECK(cdi_store_submit(store, record, &id));
    CHECK(cdi_store_review(store, id, "claim", "c-reviewer", NULL, NULL));
    CHECK(cdi_store_review(store, id, "approve", "c-reviewer", NULL, &state));
    printf("id=%s state=%s\n", id, state);
    cdi_string_free(state);

    char *view = NULL;
    CHECK(cdi_store_get(store, id, false, &view));
    int leaked = strstr(view, "submitter_email") != NULL;
    cdi_string_free(view);
    cdi_string_free(id);

    CdiStatus st = cdi_store_review(store, "CDI-000001", "reject", "c-reviewer", NULL, NULL);
    printf("reject_after_publish=%s\n", cdi_status_name(st));

    cdi_store_close(store);
    free(record);
    return leaked || st != CDI_STATUS_ILLEGAL_TRANSITION;
}
