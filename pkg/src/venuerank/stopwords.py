"""Frozen English stoplist used by the review tokenizer.

The list is fixed on purpose: review-classifier vocabularies, model dumps
and frozen test expectations all depend on it. Do not edit casually.
"""

ENGLISH_STOPWORDS = frozenset("""
a about above after again against all am an and any are aren arent as at
be because been before being below between both but by
can cannot could couldnt
did didnt do does doesnt doing dont down during
each
few for from further
had hadnt has hasnt have havent having he her here hers herself him himself
his how
i if in into is isnt it its itself
just
me more most my myself
no nor not now
of off on once only or other our ours ourselves out over own
same she should shouldnt so some such
than that the their theirs them themselves then there these they this those
through to too
under until up
very
was wasnt we were werent what when where which while who whom why will with
wont would wouldnt
you your yours yourself yourselves
""".split())
