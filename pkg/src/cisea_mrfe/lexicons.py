"""Built-in word lists: synonym table for the deterministic paraphrase
provider, polarity keywords for the heuristic judge, emotion seed words,
stopwords, and negation/hedge cues.

These are fixed at build time so the augmentation pipeline and the
emotion prototypes are reproducible without any external model.
"""

# headword -> synonyms, ordered by preference
SYNONYMS: dict[str, list[str]] = {
    # positive adjectives
    "fantastic": ["wonderful", "excellent", "superb"],
    "wonderful": ["fantastic", "marvelous", "delightful"],
    "excellent": ["outstanding", "superb", "exceptional"],
    "great": ["excellent", "terrific", "fine"],
    "good": ["fine", "decent", "solid"],
    "amazing": ["astonishing", "incredible", "stunning"],
    "awesome": ["amazing", "impressive", "remarkable"],
    "superb": ["excellent", "magnificent", "splendid"],
    "brilliant": ["superb", "dazzling", "masterful"],
    "delightful": ["charming", "lovely", "pleasant"],
    "charming": ["delightful", "endearing", "lovely"],
    "lovely": ["beautiful", "charming", "pleasant"],
    "beautiful": ["gorgeous", "lovely", "stunning"],
    "gorgeous": ["beautiful", "stunning", "splendid"],
    "pleasant": ["agreeable", "enjoyable", "nice"],
    "enjoyable": ["pleasant", "fun", "satisfying"],
    "satisfying": ["gratifying", "rewarding", "fulfilling"],
    "impressive": ["remarkable", "striking", "imposing"],
    "remarkable": ["notable", "extraordinary", "striking"],
    "outstanding": ["exceptional", "excellent", "superior"],
    "exceptional": ["outstanding", "extraordinary", "rare"],
    "perfect": ["flawless", "ideal", "impeccable"],
    "flawless": ["perfect", "impeccable", "spotless"],
    "magnificent": ["splendid", "glorious", "majestic"],
    "splendid": ["magnificent", "superb", "glorious"],
    "terrific": ["great", "fabulous", "marvelous"],
    "fabulous": ["terrific", "marvelous", "wonderful"],
    "marvelous": ["wonderful", "fabulous", "splendid"],
    "incredible": ["unbelievable", "amazing", "astounding"],
    "stunning": ["breathtaking", "gorgeous", "striking"],
    "friendly": ["welcoming", "warm", "cordial"],
    "warm": ["friendly", "cozy", "inviting"],
    "fresh": ["crisp", "new", "clean"],
    "tasty": ["delicious", "flavorful", "savory"],
    "delicious": ["tasty", "scrumptious", "delectable"],
    "fun": ["entertaining", "enjoyable", "amusing"],
    "entertaining": ["fun", "engaging", "amusing"],
    "engaging": ["captivating", "absorbing", "entertaining"],
    "captivating": ["enthralling", "engaging", "mesmerizing"],
    "gripping": ["riveting", "compelling", "thrilling"],
    "compelling": ["gripping", "persuasive", "riveting"],
    "thrilling": ["exciting", "exhilarating", "gripping"],
    "exciting": ["thrilling", "electrifying", "stirring"],
    "hilarious": ["funny", "uproarious", "comical"],
    "funny": ["hilarious", "amusing", "comical"],
    "touching": ["moving", "poignant", "heartfelt"],
    "moving": ["touching", "stirring", "affecting"],
    "memorable": ["unforgettable", "notable", "striking"],
    "refreshing": ["invigorating", "novel", "revitalizing"],
    "cozy": ["snug", "comfortable", "homey"],
    "comfortable": ["cozy", "relaxing", "pleasant"],
    "reliable": ["dependable", "trustworthy", "consistent"],
    "helpful": ["supportive", "obliging", "useful"],
    "generous": ["lavish", "ample", "bountiful"],
    "smooth": ["seamless", "effortless", "fluid"],
    "fast": ["quick", "speedy", "swift"],
    "quick": ["fast", "prompt", "rapid"],
    "cheap": ["inexpensive", "affordable", "economical"],
    "affordable": ["inexpensive", "reasonable", "economical"],
    "masterpiece": ["classic", "triumph", "gem"],
    "gem": ["treasure", "delight", "standout"],
    "joy": ["delight", "pleasure", "bliss"],
    "delight": ["joy", "pleasure", "treat"],
    "pleasure": ["delight", "enjoyment", "joy"],
    "quality": ["caliber", "grade", "standard"],
    "value": ["worth", "bargain", "merit"],
    "bargain": ["steal", "deal", "value"],
    "charm": ["appeal", "allure", "grace"],
    "elegance": ["grace", "refinement", "style"],
    "elegant": ["graceful", "refined", "stylish"],
    # negative adjectives
    "terrible": ["awful", "horrible", "dreadful"],
    "awful": ["terrible", "dreadful", "atrocious"],
    "horrible": ["horrid", "terrible", "ghastly"],
    "dreadful": ["appalling", "terrible", "frightful"],
    "bad": ["poor", "lousy", "subpar"],
    "poor": ["bad", "weak", "inferior"],
    "boring": ["dull", "tedious", "monotonous"],
    "dull": ["boring", "lifeless", "drab"],
    "tedious": ["tiresome", "monotonous", "dreary"],
    "disappointing": ["underwhelming", "unsatisfying", "lackluster"],
    "underwhelming": ["disappointing", "unimpressive", "lackluster"],
    "lackluster": ["uninspired", "dull", "flat"],
    "mediocre": ["middling", "average", "unremarkable"],
    "bland": ["flavorless", "insipid", "tasteless"],
    "stale": ["old", "flat", "musty"],
    "annoying": ["irritating", "bothersome", "grating"],
    "irritating": ["annoying", "aggravating", "vexing"],
    "frustrating": ["exasperating", "infuriating", "maddening"],
    "disgusting": ["revolting", "repulsive", "gross"],
    "revolting": ["disgusting", "repugnant", "vile"],
    "gross": ["disgusting", "nasty", "foul"],
    "nasty": ["unpleasant", "vile", "foul"],
    "unpleasant": ["disagreeable", "nasty", "distasteful"],
    "ugly": ["hideous", "unsightly", "unattractive"],
    "hideous": ["ugly", "ghastly", "grotesque"],
    "slow": ["sluggish", "plodding", "laggy"],
    "sluggish": ["slow", "lethargic", "listless"],
    "rude": ["impolite", "discourteous", "insolent"],
    "impolite": ["rude", "disrespectful", "uncivil"],
    "noisy": ["loud", "clamorous", "raucous"],
    "dirty": ["filthy", "grimy", "unclean"],
    "filthy": ["dirty", "squalid", "grubby"],
    "broken": ["faulty", "defective", "damaged"],
    "faulty": ["defective", "broken", "flawed"],
    "defective": ["faulty", "malfunctioning", "broken"],
    "useless": ["worthless", "pointless", "ineffective"],
    "worthless": ["useless", "valueless", "futile"],
    "overpriced": ["costly", "exorbitant", "overcharged"],
    "expensive": ["costly", "pricey", "dear"],
    "cheesy": ["corny", "tacky", "kitschy"],
    "predictable": ["formulaic", "unsurprising", "routine"],
    "confusing": ["perplexing", "baffling", "muddled"],
    "messy": ["chaotic", "disorderly", "sloppy"],
    "sloppy": ["careless", "messy", "slipshod"],
    "weak": ["feeble", "flimsy", "thin"],
    "flimsy": ["fragile", "weak", "insubstantial"],
    "painful": ["agonizing", "excruciating", "distressing"],
    "depressing": ["bleak", "dismal", "gloomy"],
    "bleak": ["dismal", "grim", "desolate"],
    "disaster": ["catastrophe", "fiasco", "debacle"],
    "fiasco": ["debacle", "disaster", "flop"],
    "flop": ["failure", "dud", "bomb"],
    "failure": ["flop", "letdown", "bust"],
    "letdown": ["disappointment", "anticlimax", "failure"],
    "waste": ["squander", "loss", "misuse"],
    "garbage": ["trash", "junk", "rubbish"],
    "trash": ["garbage", "junk", "rubbish"],
    "junk": ["trash", "garbage", "clutter"],
    "nightmare": ["ordeal", "horror", "torment"],
    "ordeal": ["nightmare", "trial", "hardship"],
    # neutral-ish nouns that still carry review weight
    "food": ["cuisine", "fare", "dishes"],
    "meal": ["dinner", "dish", "feast"],
    "service": ["staff", "attention", "hospitality"],
    "staff": ["crew", "team", "personnel"],
    "movie": ["film", "picture", "feature"],
    "film": ["movie", "picture", "feature"],
    "story": ["plot", "narrative", "tale"],
    "plot": ["story", "storyline", "narrative"],
    "acting": ["performance", "portrayal", "delivery"],
    "performance": ["acting", "showing", "delivery"],
    "product": ["item", "device", "gadget"],
    "device": ["gadget", "unit", "product"],
    "price": ["cost", "rate", "charge"],
    "atmosphere": ["ambiance", "mood", "vibe"],
    "ambiance": ["atmosphere", "mood", "setting"],
    "experience": ["visit", "encounter", "outing"],
    "place": ["spot", "venue", "location"],
    "restaurant": ["eatery", "diner", "bistro"],
    "hotel": ["inn", "lodge", "resort"],
    "music": ["soundtrack", "score", "tunes"],
    "screen": ["display", "panel", "monitor"],
    "battery": ["cell", "charge", "power"],
    "delivery": ["shipping", "dispatch", "arrival"],
    "packaging": ["wrapping", "box", "casing"],
}

POSITIVE_WORDS = frozenset({
    "fantastic", "wonderful", "excellent", "great", "good", "amazing", "awesome",
    "superb", "brilliant", "delightful", "charming", "lovely", "beautiful",
    "gorgeous", "pleasant", "enjoyable", "satisfying", "impressive", "remarkable",
    "outstanding", "exceptional", "perfect", "flawless", "magnificent", "splendid",
    "terrific", "fabulous", "marvelous", "incredible", "stunning", "friendly",
    "warm", "fresh", "tasty", "delicious", "fun", "entertaining", "engaging",
    "captivating", "gripping", "compelling", "thrilling", "exciting", "hilarious",
    "funny", "touching", "moving", "memorable", "refreshing", "cozy",
    "comfortable", "reliable", "helpful", "generous", "smooth", "fast", "quick",
    "cheap", "affordable", "masterpiece", "gem", "joy", "delight", "pleasure",
    "bargain", "charm", "elegance", "elegant", "superior", "crisp", "glorious",
})

NEGATIVE_WORDS = frozenset({
    "terrible", "awful", "horrible", "dreadful", "bad", "poor", "boring", "dull",
    "tedious", "disappointing", "underwhelming", "lackluster", "mediocre",
    "bland", "stale", "annoying", "irritating", "frustrating", "disgusting",
    "revolting", "gross", "nasty", "unpleasant", "ugly", "hideous", "slow",
    "sluggish", "rude", "impolite", "noisy", "dirty", "filthy", "broken",
    "faulty", "defective", "useless", "worthless", "overpriced", "expensive",
    "cheesy", "predictable", "confusing", "messy", "sloppy", "weak", "flimsy",
    "painful", "depressing", "bleak", "disaster", "fiasco", "flop", "failure",
    "letdown", "waste", "garbage", "trash", "junk", "nightmare", "ordeal",
})

# content lexicon for mask-target selection: any word with a synonym entry
# plus every polarity keyword
CONTENT_WORDS = frozenset(SYNONYMS) | POSITIVE_WORDS | NEGATIVE_WORDS

STOPWORDS = frozenset({
    "a", "an", "the", "and", "or", "but", "if", "then", "so", "of", "to", "in",
    "on", "at", "for", "with", "by", "from", "as", "is", "are", "was", "were",
    "be", "been", "being", "it", "its", "this", "that", "these", "those", "i",
    "we", "you", "he", "she", "they", "my", "our", "your", "his", "her",
    "their", "me", "us", "them", "very", "too", "just", "really", "quite",
})

NEGATION_CUES = frozenset({"not", "no", "never", "n't", "hardly"})
HEDGE_CUES = frozenset({"slightly", "somewhat", "barely", "a-bit"})

# eight emotion categories with ~10 seed words each; prototypes are built
# from the mean embedding of the seeds present in the vocabulary
EMOTION_SEEDS: dict[str, list[str]] = {
    "joy": ["happy", "joy", "delight", "cheerful", "glad", "pleased", "smile",
            "laugh", "bliss", "fun"],
    "trust": ["trust", "reliable", "honest", "loyal", "faith", "dependable",
              "secure", "confidence", "assured", "safe"],
    "fear": ["fear", "afraid", "scared", "terrified", "dread", "panic",
             "worry", "anxious", "frightened", "alarm"],
    "surprise": ["surprise", "astonished", "amazed", "unexpected", "sudden",
                 "startled", "shocked", "stunned", "wonder", "twist"],
    "sadness": ["sad", "sorrow", "grief", "unhappy", "miserable", "gloomy",
                "tearful", "mourning", "despair", "heartbroken"],
    "disgust": ["disgust", "revolting", "gross", "nasty", "repulsive", "foul",
                "sickening", "vile", "nauseating", "filthy"],
    "anger": ["anger", "angry", "furious", "rage", "outraged", "irritated",
              "annoyed", "hostile", "resentful", "mad"],
    "anticipation": ["anticipation", "expect", "eager", "hope", "await",
                     "looking", "forward", "excited", "prospect", "soon"],
}
