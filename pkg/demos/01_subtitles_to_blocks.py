"""Subtitles to duration-targeted text blocks.

Parses an SRT snippet, shows the text normalization (markup removal,
apostrophe standardization, whitespace collapsing), then groups cues into
60-second blocks and tokenizes them with the shipped stopword lists.
"""

from laughline.subtitles import build_blocks, default_stopwords, parse_srt

SRT = """\
1
00:00:02,000 --> 00:00:05,500
<i>So I went to the doctor’s office...</i>

2
00:00:06,100 --> 00:00:09,000
and the doctor says, {\\an8}"I have
bad news and worse news."

3
00:01:01,400 --> 00:01:04,000
You know what the worse news was?

4
00:01:05,000 --> 00:01:07,250
He had no idea either.
"""

cues = parse_srt(SRT)
print("parsed cues:")
for cue in cues:
    print(f"  [{cue.span.start:7.2f}, {cue.span.end:7.2f})  {cue.clean_text}")

# A cue joins the current block while its start does not exceed the block
# start plus the target duration; the cue at 61.4 s opens block 2.
blocks = build_blocks(cues, target_duration=60.0, stopwords=default_stopwords())
print(f"\n{len(blocks)} blocks at a 60 s target:")
for b in blocks:
    print(f"  [{b.span.start:7.2f}, {b.span.end:7.2f})")
    print(f"    text:   {b.text}")
    print(f"    tokens: {list(b.token_list)}")
