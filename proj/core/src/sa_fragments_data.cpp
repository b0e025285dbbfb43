// Embeds the packed fragment table; see harness/pack_sa_fragments.py.
__asm__(
    ".pushsection .rodata\n"
    ".balign 8\n"
    ".globl qevo_sa_fragments_begin\n"
    ".hidden qevo_sa_fragments_begin\n"
    "qevo_sa_fragments_begin:\n"
    ".incbin \"" QEVO_SA_FRAGMENTS_FILE "\"\n"
    ".globl qevo_sa_fragments_end\n"
    ".hidden qevo_sa_fragments_end\n"
    "qevo_sa_fragments_end:\n"
    ".popsection\n");
