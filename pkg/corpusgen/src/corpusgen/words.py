"""Word sources: a small built-in vocabulary and random letter sequences."""

from __future__ import annotations

import numpy as np

from .shaping import ALL_LETTERS

# Common words spelled with the 28 base letters plus hamza only
# (no taa marbuta or alef variants, so every corpus word is class-mappable).
VOCABULARY = [
    "كتب", "قلم", "باب", "دار", "نور", "بيت", "ولد", "بنت", "شمس", "قمر",
    "سيف", "علم", "رجل", "عمل", "يوم", "ليل", "نهر", "بحر", "جبل", "سهل",
    "ورد", "شجر", "ثمر", "خبز", "ملح", "عسل", "لبن", "سمك", "لحم", "طير",
    "فرس", "جمل", "نمر", "اسد", "ذيب", "غزال", "فيل", "قرد", "دب", "ثور",
    "عين", "يد", "رجل", "راس", "قلب", "عقل", "روح", "جسد", "ظهر", "بطن",
    "صبر", "شكر", "حمد", "عدل", "ظلم", "خير", "شر", "حق", "صدق", "كذب",
    "علي", "سعيد", "كريم", "حسن", "جميل", "طويل", "قصير", "كبير", "صغير", "جديد",
    "قديم", "بعيد", "قريب", "سريع", "بطيء", "ثقيل", "خفيف", "سهل", "صعب", "واسع",
    "كتاب", "مكتب", "مدرس", "معلم", "طالب", "درس", "علوم", "حساب", "لغه", "كلام",
    "سلام", "حرب", "جيش", "سيل", "مطر", "ثلج", "برد", "حر", "صيف", "شتاء",
    "ربيع", "خريف", "فجر", "ظهيره", "عصر", "مغرب", "عشاء", "ساعه", "دقيقه", "لحظه",
    "سنه", "شهر", "اسبوع", "ارض", "سماء", "نجم", "غيم", "ريح", "هواء", "ماء",
    "نار", "تراب", "ذهب", "فضه", "حديد", "نحاس", "زجاج", "خشب", "حجر", "رمل",
    "طريق", "شارع", "مدينه", "قريه", "بلد", "وطن", "سوق", "دكان", "مسجد", "برج",
    "جسر", "سور", "قصر", "خيمه", "سفينه", "قارب", "عربه", "حصان", "بغل", "حمار",
    "صوت", "لون", "طعم", "نسمه", "شكل", "حجم", "عدد", "حرف", "كلمه", "سطر",
]


def nonsense_word(rng: np.random.Generator, min_len: int = 2, max_len: int = 6) -> str:
    n = int(rng.integers(min_len, max_len + 1))
    letters = [ALL_LETTERS[int(rng.integers(0, len(ALL_LETTERS)))] for _ in range(n)]
    return "".join(letters)


def sample_vocabulary(rng: np.random.Generator, count: int) -> list[str]:
    idx = rng.integers(0, len(VOCABULARY), size=count)
    return [VOCABULARY[int(i)] for i in idx]


def sample_nonsense(rng: np.random.Generator, count: int) -> list[str]:
    return [nonsense_word(rng) for _ in range(count)]
