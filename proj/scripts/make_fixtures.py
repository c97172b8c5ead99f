#!/usr/bin/env python3
"""Regenerates the bundled synthetic fixtures under data/.

Produces the two taxonomy tables, the multilingual mini-corpus with gold
annotations, the linearly separable training set, the explain inputs and
reference justifications, and the scripted mock-chat files (a label-echo
script for classify and canned ReACT replies for explain).

Run from the repository root:  python3 scripts/make_fixtures.py
"""

import json
import os
import random

DATA = os.path.join(os.path.dirname(__file__), "..", "data")

HEADER = "main_id\tmain_def\tmain_example\tmain_meta\tsub_id\tsub_def\tsub_example\tsub_meta"

OTHER_ROW = (
    "Other\tAny narrative not covered by the taxonomy.\t-\t-\t"
    "Other\tAny narrative not covered by the taxonomy.\t-\t-"
)

TAXONOMY_CC = [
    (
        "CC: Criticism of climate policies",
        "Frames climate policies as harmful, costly or useless rather than protective.",
        "Articles claiming the ecotax ruins households while the climate stays the same.",
        "policy criticism; economic framing",
        [
            (
                "CC: Climate policies are ineffective",
                "Claims that emission rules and green programs fail to change the climate.",
                "A report that the ecotax cut no emissions at all.",
                "effectiveness doubt",
            ),
            (
                "CC: Climate policies harm the economy",
                "Claims that climate measures destroy jobs, budgets and industry.",
                "A story that the ecotax bankrupts factories and farms.",
                "economic damage",
            ),
        ],
    ),
    (
        "CC: Hidden plots by secret schemes of powerful groups",
        "Claims that powerful groups secretly coordinate climate events and policy for their own goals.",
        "Stories about Davos elites orchestrating crises behind closed doors.",
        "conspiracy framing",
        [
            (
                "CC: The climate agenda has hidden motives",
                "Claims that the climate agenda hides another purpose beyond the environment.",
                "Claims that sustainability talk masks depopulation plans.",
                "motive framing",
            ),
            (
                "CC: Blaming global elites",
                "Assigns blame for climate policy to a small powerful elite.",
                "Pieces blaming Davos billionaires for fabricated weather scares.",
                "elite blame",
            ),
        ],
    ),
    (
        "CC: Downplaying climate change",
        "Minimizes the reality, scale or urgency of climate change.",
        "Columns saying glaciers are fine and warming stopped.",
        "minimization",
        [
            (
                "CC: Human activities do not impact climate change",
                "Claims that human emissions play no role in the climate.",
                "An op-ed saying CO2 from cars is irrelevant to warming.",
                "causal denial",
            ),
            (
                "CC: Ice is not melting",
                "Claims that glaciers and polar ice are stable or growing.",
                "A piece claiming the glacier in the Alps grew this winter.",
                "ice stability",
            ),
        ],
    ),
]

TAXONOMY_URW = [
    (
        "URW: Blaming the war on others rather than the invader",
        "Shifts responsibility for the war away from the invading side.",
        "Articles saying Kyiv provoked the conflict.",
        "blame shift",
        [
            (
                "URW: Ukraine is the aggressor",
                "Claims that Ukraine started or escalated the war.",
                "A story that Kyiv shelled its own towns to provoke war.",
                "role inversion",
            ),
            (
                "URW: The West are the aggressors",
                "Claims that NATO and the West drove the war.",
                "A piece calling NATO expansion the true cause of the war.",
                "western blame",
            ),
        ],
    ),
    (
        "URW: Discrediting the West, Diplomacy",
        "Portrays Western institutions and diplomacy as weak, broken or hostile.",
        "Stories mocking failed summits and empty sanctions.",
        "discredit framing",
        [
            (
                "URW: Diplomacy does/will not work",
                "Claims that talks and treaties cannot end the war.",
                "An article calling the peace summit pointless theatre.",
                "diplomacy futility",
            ),
            (
                "URW: The West is weak",
                "Claims that Western states are divided, tired and powerless.",
                "A piece saying sanctions hurt Brussels more than Moscow.",
                "weakness framing",
            ),
        ],
    ),
    (
        "URW: Praise of Russia",
        "Celebrates Russian strength, leadership or mission.",
        "Articles hailing the army as unstoppable and noble.",
        "praise framing",
        [
            (
                "URW: Praise of Russian military might",
                "Celebrates the power of the Russian armed forces.",
                "A story that the army advances unopposed on every front.",
                "military praise",
            ),
            (
                "URW: Russia is a guarantor of peace",
                "Presents Russia as the true protector of peace and order.",
                "A piece saying only Moscow can bring lasting peace.",
                "peace guarantor",
            ),
        ],
    ),
]

ARTICLES = {
    "EN_CC_0101.txt": (
        "The new ecotax passed parliament this week. Families will pay more for fuel and "
        "heat while CO2 keeps rising. Factory owners warn that the levy will close plants "
        "and cut jobs. Supporters promised measurable gains, yet emissions data show no "
        "change at all. Critics call the package an expensive ritual that punishes workers. "
        "The treasury collects, the climate does not notice."
    ),
    "BG_CC_0102.txt": (
        "Новият данък ecotax влезе в сила тази седмица. Емисиите на CO2 не намаляват "
        "въпреки обещанията. Докладът показва, че програмата не промени нищо. Политиците "
        "хвалят мерките, но данните мълчат. Скептиците наричат плана скъп и безполезен."
    ),
    "PT_CC_0103.txt": (
        "O novo imposto ecotax chegou às fábricas. Empresários dizem que o CO2 continua "
        "igual enquanto os custos sobem. Sindicatos temem demissões nas cidades "
        "industriais. O orçamento das famílias encolhe a cada inverno. Economistas chamam "
        "a medida de golpe na indústria."
    ),
    "EN_CC_0104.txt": (
        "Leaked notes from the Davos forum describe a coordinated climate message. The "
        "attendees agreed to push sustainability rules written long before any debate. "
        "Observers say the agenda serves goals that have little to do with weather. One "
        "delegate admitted the plan covers land purchases and population policy. The "
        "public sees green slogans while the real motives stay in private rooms."
    ),
    "RU_CC_0105.txt": (
        "На форуме Davos элиты снова обсуждали климат за закрытыми дверями. Миллиардеры "
        "пишут правила, за которые никто не голосовал. Зеленая повестка скрывает передел "
        "собственности. Климатические страхи выгодны узкому кругу богатых семей. Обычные "
        "люди платят, а элиты скупают землю."
    ),
    "HI_CC_0106.txt": (
        "Davos सम्मेलन में जलवायु योजना गुप्त रही। नेताओं ने पर्दे के पीछे नियम बनाए। हरित एजेंडा का असली "
        "मकसद कुछ और है। जनता को नारे मिलते हैं और फैसले छिपे रहते हैं। रिपोर्ट कहती है कि योजना जमीन "
        "और धन से जुड़ी है।"
    ),
    "EN_CC_0107.txt": (
        "A NASA chart shared online shows the glacier thicker than a decade ago. The "
        "column claims polar ice is stable and the panic is theatre. Winter records broke "
        "again across the north. The author argues that melting stories ignore the data. "
        "Ice, he writes, does not read headlines."
    ),
    "RU_CC_0108.txt": (
        "Колонка уверяет, что климат меняется сам по себе. Выбросы CO2 от машин якобы "
        "ничего не значат. Автор цитирует график NASA о стабильном льде. Солнце и океан "
        "решают всё, пишет он. Человек тут ни при чем, заключает текст."
    ),
    "BG_CC_0109.txt": (
        "Графика на NASA показва, че ледът расте. Зимата отново счупи рекорди. Паниката "
        "не отговаря на данните. Същевременно данъкът ecotax не намали нищо. Скъпите "
        "мерки не променят климата. Две истории, един извод: шумът е повече от фактите."
    ),
    "EN_URW_0201.txt": (
        "The broadcast insisted that Kyiv fired first across the line. Officials repeated "
        "that NATO advisers staged the incident. The invasion, viewers were told, was a "
        "forced answer rather than a choice. Old clips were cut to show provocation. "
        "Responsibility, the anchor said, sits with Ukraine alone."
    ),
    "RU_URW_0202.txt": (
        "Эфир объяснял, что NATO расширялся к границам двадцать лет. Запад вооружал "
        "соседей и готовил плацдарм. Конфликт называют ответом, а не нападением. Вина, по "
        "словам ведущего, лежит на Вашингтоне и Брюсселе. Москва лишь реагировала на "
        "угрозу."
    ),
    "BG_URW_0203.txt": (
        "Предаването повтаряше, че Киев стреля пръв. Според коментатора NATO подготвяше "
        "провокацията от години. Западът въоръжаваше и чакаше повод. Инвазията беше "
        "наречена принуден отговор. Вината, каза водещият, е на Киев и на съюзниците му."
    ),
    "EN_URW_0204.txt": (
        "Another G7 summit ended with photographs and no plan. Negotiators praised "
        "progress that nobody can measure. The ceasefire drafts gather dust in three "
        "capitals. Analysts on the panel called the talks pointless theatre. Peace, the "
        "guest concluded, will not come from conference rooms."
    ),
    "PT_URW_0205.txt": (
        "A cimeira do G7 terminou sem acordo outra vez. As sanções custam mais a Bruxelas "
        "do que a Moscovo. Os aliados discutem entre si enquanto os preços sobem. "
        "Comentadores falam de um Ocidente cansado e dividido. A fraqueza, dizem, já não "
        "se esconde."
    ),
    "HI_URW_0206.txt": (
        "G7 शिखर बैठक फिर खाली हाथ समाप्त हुई। वार्ता से कोई नतीजा नहीं निकला। मसौदे मेज पर पड़े रहे। "
        "विशेषज्ञ बोले कि सम्मेलन केवल दिखावा है। शांति वार्ता से नहीं आएगी, यही निष्कर्ष था।"
    ),
    "EN_URW_0207.txt": (
        "The report from the front praised the Kremlin forces as unstoppable. Columns "
        "advance, the correspondent said, faster than maps can be printed. Every defense "
        "line is described as already broken. The army, viewers heard, fights with "
        "discipline and endless supply. Strength, the segment repeated, speaks for "
        "itself."
    ),
    "RU_URW_0208.txt": (
        "Комментатор называл Kremlin гарантом порядка в регионе. Только Москва, звучало в "
        "эфире, способна принести прочный мир. Соседи, по его словам, обязаны "
        "безопасностью именно России. Армия защищает, а не нападает, повторял гость. Мир "
        "придет из Москвы, заключил он."
    ),
    "PT_URW_0209.txt": (
        "O programa elogiou as forças do Kremlin como imparáveis. Cada avanço foi "
        "descrito como prova de disciplina. Ao mesmo tempo, o Ocidente aparece cansado e "
        "dividido. As sanções, disse o convidado, fracassaram outra vez. Força de um "
        "lado, fraqueza do outro: essa foi a mensagem."
    ),
    "EN_OTH_0301.txt": (
        "The regional fair opened with a record number of stalls. Farmers showed new "
        "cheese and honey varieties. Children queued for the wooden carousel. The mayor "
        "cut the ribbon under light rain. Organizers expect visitors through Sunday."
    ),
    "HI_OTH_0302.txt": (
        "शहर में पुस्तक मेला शुरू हुआ। बच्चों के लिए कहानी का कोना बना। लेखकों ने अपनी नई किताबें पढ़ीं। "
        "बारिश के बावजूद भीड़ बढ़ती रही। मेला रविवार तक चलेगा।"
    ),
}

# (filename, narratives, subs) with subs grouped in narrative order
ANNOTATIONS = [
    ("BG_CC_0102.txt", ["CC: Criticism of climate policies"],
     ["CC: Climate policies are ineffective"]),
    ("BG_CC_0109.txt",
     ["CC: Downplaying climate change", "CC: Criticism of climate policies"],
     ["CC: Ice is not melting", "CC: Climate policies are ineffective"]),
    ("BG_URW_0203.txt", ["URW: Blaming the war on others rather than the invader"],
     ["URW: Ukraine is the aggressor", "URW: The West are the aggressors"]),
    ("EN_CC_0101.txt", ["CC: Criticism of climate policies"],
     ["CC: Climate policies are ineffective", "CC: Climate policies harm the economy"]),
    ("EN_CC_0104.txt", ["CC: Hidden plots by secret schemes of powerful groups"],
     ["CC: The climate agenda has hidden motives"]),
    ("EN_CC_0107.txt", ["CC: Downplaying climate change"], ["CC: Ice is not melting"]),
    ("EN_OTH_0301.txt", ["Other"], ["Other"]),
    ("EN_URW_0201.txt", ["URW: Blaming the war on others rather than the invader"],
     ["URW: Ukraine is the aggressor"]),
    ("EN_URW_0204.txt", ["URW: Discrediting the West, Diplomacy"],
     ["URW: Diplomacy does/will not work"]),
    ("EN_URW_0207.txt", ["URW: Praise of Russia"], ["URW: Praise of Russian military might"]),
    ("HI_CC_0106.txt", ["CC: Hidden plots by secret schemes of powerful groups"],
     ["CC: The climate agenda has hidden motives"]),
    ("HI_OTH_0302.txt", ["Other"], ["Other"]),
    ("HI_URW_0206.txt", ["URW: Discrediting the West, Diplomacy"],
     ["URW: Diplomacy does/will not work"]),
    ("PT_CC_0103.txt", ["CC: Criticism of climate policies"],
     ["CC: Climate policies harm the economy"]),
    ("PT_URW_0205.txt", ["URW: Discrediting the West, Diplomacy"], ["URW: The West is weak"]),
    ("PT_URW_0209.txt", ["URW: Praise of Russia", "URW: Discrediting the West, Diplomacy"],
     ["URW: Praise of Russian military might", "URW: The West is weak"]),
    ("RU_CC_0105.txt", ["CC: Hidden plots by secret schemes of powerful groups"],
     ["CC: Blaming global elites", "CC: The climate agenda has hidden motives"]),
    ("RU_CC_0108.txt", ["CC: Downplaying climate change"],
     ["CC: Human activities do not impact climate change"]),
    ("RU_URW_0202.txt", ["URW: Blaming the war on others rather than the invader"],
     ["URW: The West are the aggressors"]),
    ("RU_URW_0208.txt", ["URW: Praise of Russia"], ["URW: Russia is a guarantor of peace"]),
]

# short grounded justifications used as references for the generation metric
REFERENCES = {
    "BG_CC_0102.txt": "The article argues the ecotax changed nothing because CO2 emissions "
                      "stayed flat despite promises, presenting the program as expensive and "
                      "useless, which criticizes climate policy as ineffective.",
    "BG_CC_0109.txt": "By citing a NASA chart of growing ice and record winters, the text "
                      "dismisses climate alarm as louder than the facts, downplaying climate "
                      "change while also calling the ecotax pointless.",
    "BG_URW_0203.txt": "The broadcast blames Kyiv for firing first and NATO for preparing a "
                       "provocation, framing the invasion as a forced response and shifting "
                       "war guilt onto Ukraine and its allies.",
    "EN_CC_0101.txt": "The piece frames the ecotax as an expensive ritual: families and "
                      "factories pay more, jobs are at risk, and emissions data show no "
                      "change, so climate policy is painted as useless and harmful.",
    "EN_CC_0104.txt": "Leaked Davos notes allegedly show rules written before any debate and "
                      "goals beyond weather, including land purchases, suggesting the climate "
                      "agenda hides motives set by powerful groups in private.",
    "EN_CC_0107.txt": "The column uses a NASA chart to claim the glacier thickened and polar "
                      "ice is stable, casting melting reports as theatre that ignores data, "
                      "thereby downplaying climate change.",
    "EN_OTH_0301.txt": "The article reports a regional fair with stalls, farmers, a carousel "
                       "and a ribbon cutting, a local event story without any narrative from "
                       "the taxonomy.",
    "EN_URW_0201.txt": "The broadcast claims Kyiv fired first and NATO staged the incident, "
                       "telling viewers the invasion was a forced answer, which blames "
                       "Ukraine rather than the invader for the war.",
    "EN_URW_0204.txt": "The panel describes a G7 summit that produced photographs but no "
                       "plan, ceasefire drafts gathering dust and talks called pointless "
                       "theatre, arguing diplomacy will not bring peace.",
    "EN_URW_0207.txt": "The report calls Kremlin forces unstoppable, with columns advancing "
                       "faster than maps print and every defense line broken, celebrating "
                       "Russian military might.",
    "HI_CC_0106.txt": "The article says the Davos climate plan stayed secret, rules were "
                      "made behind curtains and the green agenda has a different real "
                      "purpose tied to land and money, implying hidden motives.",
    "HI_OTH_0302.txt": "The story covers a book fair with a children's corner, author "
                       "readings and growing crowds despite rain, a cultural event outside "
                       "the narrative taxonomy.",
    "HI_URW_0206.txt": "The report says the G7 summit ended empty-handed, drafts stayed on "
                       "the table and experts called the conference a show, concluding peace "
                       "will not come from talks.",
    "PT_CC_0103.txt": "The article claims the ecotax raises costs while CO2 stays the same, "
                      "unions fear layoffs and family budgets shrink, framing climate policy "
                      "as a blow to the economy.",
    "PT_URW_0205.txt": "The piece says the G7 ended without agreement, sanctions cost "
                       "Brussels more than Moscow and allies quarrel, portraying a tired, "
                       "divided and weak West.",
    "PT_URW_0209.txt": "The program praises Kremlin forces as unstoppable proof of "
                       "discipline while showing a tired, divided West with failed "
                       "sanctions, pairing Russian might with Western weakness.",
    "RU_CC_0105.txt": "The text says Davos elites discuss climate behind closed doors, "
                      "billionaires write unvoted rules and the green agenda hides a "
                      "property grab, blaming elites and alleging hidden motives.",
    "RU_CC_0108.txt": "The column argues the climate changes by itself, car CO2 means "
                      "nothing and sun and ocean decide everything, denying any human role "
                      "in climate change.",
    "RU_URW_0202.txt": "The program blames NATO expansion and Western arming of neighbors "
                       "for the conflict, calling it a response rather than an attack, so "
                       "the West appears as the aggressor.",
    "RU_URW_0208.txt": "The commentator calls the Kremlin the guarantor of order, says only "
                       "Moscow can bring lasting peace and presents the army as protective, "
                       "casting Russia as the peacekeeper.",
}

SEPARABLE_POOL_A = ["solar", "panels", "turbine", "wind", "grid", "battery", "storage",
                    "renewable", "voltage", "inverter"]
SEPARABLE_POOL_B = ["tariff", "budget", "deficit", "inflation", "bond", "yield", "taxation",
                    "subsidy", "ledger", "treasury"]


def write(path, content):
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(content)


def taxonomy_tsv(narratives, with_other=True):
    lines = [HEADER]
    for main_id, main_def, main_ex, main_meta, subs in narratives:
        for sub_id, sub_def, sub_ex, sub_meta in subs:
            lines.append("\t".join([main_id, main_def, main_ex, main_meta,
                                    sub_id, sub_def, sub_ex, sub_meta]))
    if with_other:
        lines.append(OTHER_ROW)
    return "\n".join(lines) + "\n"


def echo_mock_entries(annotations, sub_parent):
    entries = []
    for _, narratives, subs in annotations:
        if narratives == ["Other"]:
            entries.append({"response": "No candidate label is supported.\nLABELS: none"})
            continue
        entries.append({"response": "Keeping the supported labels.\nLABELS: "
                                    + "; ".join(narratives)})
        for narrative in narratives:
            mine = [s for s in subs if sub_parent.get(s) == narrative]
            if mine:
                entries.append({"response": "Selecting the supported sub-narratives.\nLABELS: "
                                            + "; ".join(mine)})
            else:
                entries.append({"response": "No sub-narrative applies.\nLABELS: none"})
    return entries


def react_reply(conclusion):
    return ("Thought: the evidence sentences carry the central claims.\n"
            "Action: checked the claims against the narrative reference entries.\n"
            "Observation: the numbered sentences support the narrative.\n"
            "Conclusion: " + conclusion)


def main():
    # taxonomies
    write(os.path.join(DATA, "taxonomy_cc.tsv"), taxonomy_tsv(TAXONOMY_CC))
    write(os.path.join(DATA, "taxonomy_urw.tsv"), taxonomy_tsv(TAXONOMY_URW))

    # mini-corpus
    for name, text in ARTICLES.items():
        write(os.path.join(DATA, "corpus", "articles", name), text + "\n")
    annotation_lines = [f"{name}\t{';'.join(narrs)}\t{';'.join(subs)}"
                        for name, narrs, subs in ANNOTATIONS]
    write(os.path.join(DATA, "corpus", "annotations.tsv"), "\n".join(annotation_lines) + "\n")

    # classify echo mock (entries in sorted-filename order, matching run order)
    sub_parent = {}
    for tax in (TAXONOMY_CC, TAXONOMY_URW):
        for main_id, _, _, _, subs in tax:
            for sub_id, _, _, _ in subs:
                sub_parent[sub_id] = main_id
    sub_parent["Other"] = "Other"
    ordered = sorted(ANNOTATIONS, key=lambda a: a[0])
    write(os.path.join(DATA, "mock", "classify_echo.json"),
          json.dumps(echo_mock_entries(ordered, sub_parent), indent=2, ensure_ascii=False) + "\n")

    # explain inputs: first gold narrative plus its subs
    explain_lines = []
    for name, narrs, subs in ordered:
        dominant = narrs[0]
        mine = [s for s in subs if sub_parent.get(s) == dominant]
        explain_lines.append(f"{name}\t{dominant}\t{';'.join(mine)}")
    write(os.path.join(DATA, "explain_input.tsv"), "\n".join(explain_lines) + "\n")

    # explain mock: one canned ReACT reply per input line, in order; the
    # EN_URW_0207 line replies over the 80-word limit twice to exercise the
    # corrective retry and the truncation fallback
    long_sentence = ("The segment repeats that the army is unstoppable and that every single "
                     "defense line has already collapsed under pressure while columns keep "
                     "advancing faster than any map can be printed for the evening broadcast "
                     "audience across the country tonight.")  # 38 words ending mid-way
    long_conclusion = (long_sentence + " " + long_sentence + " and the anchor adds praise for "
                       "discipline and supply lines again and again until the clock runs out")
    explain_entries = []
    for name, narrs, _ in ordered:
        if name == "EN_URW_0207.txt":
            explain_entries.append({"response": react_reply(long_conclusion)})
            explain_entries.append({"response": react_reply(long_conclusion)})
        else:
            explain_entries.append({"response": react_reply(REFERENCES[name])})
    write(os.path.join(DATA, "mock", "explain.json"),
          json.dumps(explain_entries, indent=2, ensure_ascii=False) + "\n")

    # references for the generation metric
    ref_lines = [f"{name}\t{REFERENCES[name]}" for name, _, _ in ordered]
    write(os.path.join(DATA, "references.tsv"), "\n".join(ref_lines) + "\n")

    # linearly separable set: 40 articles, 2 labels, disjoint token pools
    rng = random.Random(20240601)
    sep_tax = [
        ("CC: Renewable surge", "Coverage of rapidly expanding renewable power.",
         "Grid reports on solar and wind capacity.", "energy topic",
         [("CC: Renewable surge grows", "Reports of growing renewable capacity.",
           "A story on new solar and storage records.", "growth")]),
        ("CC: Fiscal strain", "Coverage of budget pressure and public debt.",
         "Treasury reports on deficits and yields.", "fiscal topic",
         [("CC: Fiscal strain deepens", "Reports of worsening budget pressure.",
           "A story on rising deficits and bond yields.", "pressure")]),
    ]
    write(os.path.join(DATA, "separable", "taxonomy.tsv"), taxonomy_tsv(sep_tax, with_other=False))
    sep_annotations = []
    for i in range(40):
        is_a = i % 2 == 0
        pool = SEPARABLE_POOL_A if is_a else SEPARABLE_POOL_B
        words = [pool[rng.randrange(len(pool))] for _ in range(12)]
        name = f"EN_CC_{5001 + i}.txt"
        write(os.path.join(DATA, "separable", "articles", name), " ".join(words) + ".\n")
        narrative = "CC: Renewable surge" if is_a else "CC: Fiscal strain"
        sub = "CC: Renewable surge grows" if is_a else "CC: Fiscal strain deepens"
        sep_annotations.append(f"{name}\t{narrative}\t{sub}")
    write(os.path.join(DATA, "separable", "annotations.tsv"), "\n".join(sep_annotations) + "\n")

    print("fixtures written under", os.path.abspath(DATA))


if __name__ == "__main__":
    main()
