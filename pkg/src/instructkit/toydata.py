"""Writes the bundled synthetic toy corpus: data files, dataset manifest,
task specs and a runnable config.

Stands in for the real source benchmarks, which are not shipped. Content
is fixed (no wall clock, no ambient randomness), so two invocations
produce byte-identical trees.
"""

from __future__ import annotations

import json
from pathlib import Path

import yaml

from .corpus import dumps_line
from .ingest import serialize_kv

# --- English review topic classification ---

_REVIEWS_EN = [
    ("My personal favorite is Nick and Joe's.", "Anecdotes/Miscellaneous"),
    ("The pasta was creamy and the bread arrived warm.", "Food"),
    ("Forty dollars for a sandwich is simply absurd.", "Price"),
    ("Our waiter checked on us constantly and refilled drinks fast.", "Service"),
    ("Dim lights and soft jazz made the evening feel special.", "Ambience"),
    ("The dumplings were doughy but the broth was rich.", "Food"),
    ("Happy hour prices make this place a steal.", "Price"),
    ("Staff ignored us for twenty minutes before taking the order.", "Service"),
    ("The patio overlooks the river and catches the sunset.", "Ambience"),
    ("I only come here when my cousin visits from Ohio.", "Anecdotes/Miscellaneous"),
    ("Portions are tiny for what they charge.", "Price"),
    ("The grilled salmon fell apart perfectly under the fork.", "Food"),
    ("Hostess found us a table even without a reservation.", "Service"),
    ("Exposed brick and candlelight give it a cozy feel.", "Ambience"),
    ("We ended up singing karaoke with the owner at midnight.", "Anecdotes/Miscellaneous"),
    ("The curry had real depth and a slow pleasant burn.", "Food"),
    ("Two courses and wine for under thirty bucks.", "Price"),
    ("Water glasses sat empty through the whole main course.", "Service"),
    ("Loud traffic noise drowned out our conversation.", "Ambience"),
    ("My dog is weirdly famous with the kitchen crew.", "Anecdotes/Miscellaneous"),
    ("Fries were limp and clearly fried twice.", "Food"),
    ("The tasting menu is worth every cent.", "Price"),
    ("Manager personally apologized and comped the dessert.", "Service"),
    ("Tables are packed so close you hear every neighbor.", "Ambience"),
]

REVIEW_TOPICS = ["Food", "Price", "Service", "Ambience", "Anecdotes/Miscellaneous"]

# --- Chinese product catalog classification ---

_CATALOG_ZH = [
    ("复古熟铁炒锅32cm家用少油烟", "厨具"),
    ("撞色拼接连衣裙春季新款", "服饰"),
    ("无线蓝牙耳机降噪长续航", "数码"),
    ("全棉四件套床品宿舍家用", "家居"),
    ("不粘平底煎锅电磁炉通用", "厨具"),
    ("男士修身牛仔外套加绒", "服饰"),
    ("智能手环心率监测防水", "数码"),
    ("北欧风陶瓷花瓶客厅摆件", "家居"),
    ("加厚砧板实木防霉家用", "厨具"),
    ("宽松针织毛衣女秋冬", "服饰"),
    ("便携充电宝两万毫安快充", "数码"),
    ("遮光窗帘卧室免打孔", "家居"),
    ("不锈钢汤锅复底燃气适用", "厨具"),
    ("儿童纯棉卫衣卡通印花", "服饰"),
    ("机械键盘青轴游戏办公", "数码"),
    ("懒人沙发单人阳台躺椅", "家居"),
    ("陶瓷刀水果刀套装礼盒", "厨具"),
    ("真丝丝巾长款礼盒装", "服饰"),
    ("高清摄像头电脑直播专用", "数码"),
    ("香薰蜡烛无烟助眠礼盒", "家居"),
    ("竹制蒸笼家用三层", "厨具"),
    ("运动速干T恤男夏季", "服饰"),
    ("电子书阅读器护眼墨水屏", "数码"),
    ("收纳箱可折叠大号三件装", "家居"),
]

CATALOG_LABELS = ["厨具", "服饰", "数码", "家居"]

# --- span-annotated NER sources ---
# Each record is a list of (piece, label-or-None); offsets are computed, so
# surfaces always slice out exactly.

GARMENT_LABELS = ["图案", "材质", "颜色", "领型"]

_GARMENT_NER_ZH = [
    [("撞色", "图案"), ("拼接的领口以及大口袋", None)],
    [("纯棉", "材质"), ("质地柔软适合贴身穿着", None)],
    [("经典", None), ("圆领", "领型"), ("设计搭配", None), ("条纹", "图案"), ("元素", None)],
    [("春季新款", None), ("雪纺", "材质"), ("衬衫颜色为", None), ("藕粉", "颜色")],
    [("这件外套没有任何装饰细节", None)],
    [("翻领", "领型"), ("工装夹克采用", None), ("帆布", "材质"), ("面料", None)],
    [("波点", "图案"), ("半身裙裙摆垂坠", None)],
    [("墨绿", "颜色"), ("色", None), ("灯芯绒", "材质"), ("背带裤", None)],
    [("立领", "领型"), ("盘扣上衣绣有", None), ("祥云", "图案"), ("纹样", None)],
    [("亚麻", "材质"), ("衬衣透气性好颜色偏", None), ("米白", "颜色")],
    [("樱桃", "图案"), ("印花卫衣配", None), ("连帽领", "领型")],
    [("基础款打底衫剪裁利落", None)],
    [("藏青", "颜色"), ("羊毛", "材质"), ("大衣垂感出色", None)],
    [("几何", "图案"), ("提花毛衣配", None), ("高领", "领型"), ("保暖", None)],
    [("真丝", "材质"), ("吊带裙色号为", None), ("香槟金", "颜色")],
    [("斜纹", "图案"), ("面料的", None), ("西装领", "领型"), ("外套", None)],
    [("牛仔", "材质"), ("短裙水洗做旧", None), ("浅蓝", "颜色"), ("色调", None)],
    [("卡通", "图案"), ("贴布童装", None), ("圆领", "领型"), ("卫衣", None)],
]

LISTING_LABELS = ["BRAND", "COLOR", "MATERIAL", "SIZE"]

_LISTING_NER_EN = [
    [("Stratus", "BRAND"), (" running shoes in ", None), ("crimson", "COLOR"), (" with a ", None), ("mesh", "MATERIAL"), (" upper", None)],
    [("Plain unbranded travel mug with no listed specs", None)],
    [("Foldable ", None), ("aluminium", "MATERIAL"), (" camp table, ", None), ("medium", "SIZE"), (" footprint", None)],
    [("Nordhaus", "BRAND"), (" throw blanket, ", None), ("sage", "COLOR"), (", ", None), ("wool", "MATERIAL"), (" blend", None)],
    [("Classic ", None), ("denim", "MATERIAL"), (" jacket from ", None), ("Ferralto", "BRAND"), (" in ", None), ("indigo", "COLOR")],
    [("Kids rain boots, ", None), ("yellow", "COLOR"), (", size ", None), ("small", "SIZE")],
    [("Matte ", None), ("ceramic", "MATERIAL"), (" vase by ", None), ("Arvello", "BRAND")],
    [("Slim ", None), ("large", "SIZE"), (" phone sleeve in ", None), ("charcoal", "COLOR"), (" ", None), ("felt", "MATERIAL")],
    [("Veloway", "BRAND"), (" cycling jersey, ", None), ("extra-large", "SIZE"), (" fit", None)],
    [("Hand-poured soy candle, ", None), ("amber", "COLOR"), (" glass", None)],
    [("Brushed ", None), ("steel", "MATERIAL"), (" water bottle, ", None), ("one-litre", "SIZE")],
    [("Cotton", "MATERIAL"), (" crew socks three-pack from ", None), ("Loftsole", "BRAND")],
]

# --- English review QA (extractive) ---

_REVIEW_QA_EN = [
    ("The battery lasts about ten hours on a single charge, which covers my whole shift.", "How long does the battery last?", "about ten hours"),
    ("Shipping took three days and the box arrived undamaged.", "How long did shipping take?", "three days"),
    ("The blender crushes ice without stalling, though it is loud.", "What is the downside of the blender?", "it is loud"),
    ("I wear a medium normally and the medium here fit true to size.", "Does it fit true to size?", "true to size"),
    ("Customer support replaced the cracked screen within a week.", "What did customer support do?", "replaced the cracked screen"),
    ("The fabric softened noticeably after two washes.", "When did the fabric soften?", "after two washes"),
    ("It pairs with my phone instantly but drops the signal in the kitchen.", "Where does it drop the signal?", "in the kitchen"),
    ("The handle stays cool even after twenty minutes on the stove.", "How long can it stay on the stove with a cool handle?", "twenty minutes"),
    ("Assembly needed only the included hex key and about half an hour.", "What tool does assembly need?", "the included hex key"),
    ("The color faded from forest green to a dull olive by summer.", "What color did it fade to?", "a dull olive"),
    ("For the price of two coffees this charger is unbeatable.", "How much does the charger cost?", "the price of two coffees"),
    ("The keyboard backlight has three levels and remembers the last one.", "How many backlight levels are there?", "three levels"),
    ("My cat immediately claimed the box it shipped in.", "Who claimed the shipping box?", "My cat"),
    ("The straps dig in when the backpack is loaded past ten kilos.", "When do the straps dig in?", "loaded past ten kilos"),
    ("It survived a drop from the kitchen counter onto tile.", "What did it survive?", "a drop from the kitchen counter"),
    ("The app update finally fixed the crashing on startup.", "What did the app update fix?", "the crashing on startup"),
]

# --- Chinese title -> description generation ---

_DESC_GEN_ZH = [
    ("复古熟铁炒锅32cm", "这款32厘米的复古熟铁炒锅采用传统工艺锻打而成, 导热均匀, 少油烟不易粘锅, 适合家用与商用爆炒。"),
    ("无线降噪耳机Pro", "佩戴轻盈的无线耳机, 主动降噪隔绝地铁噪音, 单次充电可聆听一整天, 通话清晰稳定。"),
    ("全棉刺绣四件套", "精梳全棉面料搭配细腻刺绣, 亲肤透气, 床单被套经多道水洗更柔软, 为卧室增添温馨质感。"),
    ("便携折叠露营桌", "铝合金桌面折叠后仅背包大小, 展开稳固承重, 野餐露营随取随用, 收纳袋一并附赠。"),
    ("儿童卡通保温杯", "食品级内胆保温长达十小时, 杯身印有趣味卡通图案, 防漏杯盖小手也能轻松开合。"),
    ("真丝印花长巾", "桑蚕丝手感顺滑, 复古印花在光线下呈现柔和光泽, 既能点缀衣领也可作为发带使用。"),
    ("智能体脂秤家用", "高精度传感器测量体重与体脂, 蓝牙同步手机应用, 全家成员数据分开记录一目了然。"),
    ("北欧原木床头柜", "原木纹理自然温润, 抽屉静音滑轨顺滑耐用, 简约线条轻松融入各种卧室风格。"),
    ("加绒防风骑行手套", "内里加绒锁温, 掌心防滑颗粒稳握车把, 指尖导电面料无需脱手套即可操作屏幕。"),
    ("迷你胶囊咖啡机", "一键萃取浓缩咖啡, 机身纤细不占台面, 兼容主流胶囊, 清晨三十秒唤醒味蕾。"),
    ("藤编收纳篮三件组", "手工藤编透气耐用, 三种尺寸层叠收纳杂物, 自然材质让角落也变得整洁耐看。"),
    ("防泼水通勤双肩包", "面料防泼水应对突来阵雨, 独立电脑仓保护设备, 背部透气网布久背不闷热。"),
    ("陶瓷釉下彩餐具套装", "釉下彩工艺色彩温润且不褪色, 盘碗可进微波炉与洗碗机, 送礼自用皆宜。"),
    ("复古机械闹钟", "金属机身搭配夜光指针, 铃声清脆唤醒不刺耳, 无需电池上弦即走, 桌面复古摆件之选。"),
]

# --- Chinese product matching pairs ---

_MATCH_ZH = [
    ("复古熟铁炒锅32cm家用", [("材质", "熟铁"), ("型号", "L70846"), ("锅类型", "少油烟、不易粘锅")],
     "复古铁锅炒菜不粘锅商用", [("流行元素", "复古"), ("品牌", "other/其他")], True),
    ("无线蓝牙耳机降噪版", [("连接方式", "蓝牙5.3"), ("续航", "30小时")],
     "降噪无线耳机长续航", [("佩戴方式", "入耳式"), ("颜色", "曜石黑")], True),
    ("全棉四件套1.8米床", [("材质", "全棉"), ("规格", "1.8米床")],
     "竹纤维凉席三件套", [("材质", "竹纤维"), ("适用季节", "夏季")], False),
    ("智能手环运动防水", [("防水等级", "5ATM"), ("屏幕", "AMOLED")],
     "智能运动手环心率版", [("监测", "心率血氧"), ("续航", "14天")], True),
    ("北欧陶瓷花瓶白色", [("材质", "陶瓷"), ("风格", "北欧")],
     "美式铸铁烛台复古", [("材质", "铸铁"), ("风格", "美式")], False),
    ("男士牛仔外套加绒", [("材质", "牛仔布"), ("厚度", "加绒")],
     "加绒牛仔夹克男款", [("版型", "修身"), ("颜色", "深蓝")], True),
    ("便携充电宝20000mAh", [("容量", "20000mAh"), ("快充", "22.5W")],
     "迷你风扇手持静音", [("供电", "USB充电"), ("档位", "三档")], False),
    ("真丝丝巾礼盒长款", [("材质", "桑蚕丝"), ("长度", "180cm")],
     "长款真丝围巾礼盒装", [("工艺", "手工卷边"), ("图案", "印花")], True),
    ("机械键盘87键青轴", [("轴体", "青轴"), ("配列", "87键")],
     "无线鼠标人体工学", [("连接", "2.4G"), ("按键数", "6键")], False),
    ("懒人沙发单人可躺", [("填充", "EPP颗粒"), ("承重", "150kg")],
     "单人豆袋沙发阳台", [("面料", "科技布"), ("颜色", "燕麦色")], True),
]

_QUERIES_EN = [
    "red running shoes men",
    "stainless steel water bottle 1l",
    "wireless earbuds noise cancelling cheap",
    "cotton bed sheets queen size",
    "cast iron skillet pre seasoned",
    "kids rain boots yellow",
    "laptop stand adjustable aluminium",
    "ceramic pour over coffee set",
    "winter cycling gloves touchscreen",
    "foldable camping table small",
    "linen curtains 84 inch",
    "dog harness no pull medium",
]


def _compose(pieces):
    text = ""
    spans = []
    for piece, label in pieces:
        if label is not None:
            spans.append([len(text), len(text) + len(piece), label])
        text += piece
    return text, spans


def _match_input(title_a, attrs_a, title_b, attrs_b) -> str:
    return (
        f"商品A: {title_a} {serialize_kv(attrs_a)}\n"
        f"商品B: {title_b} {serialize_kv(attrs_b)}"
    )


def _task(
    task_id,
    dataset_id,
    paradigm,
    language,
    description,
    prompts,
    constraints=None,
    candidates=None,
    generalization=None,
):
    doc = {
        "task_id": task_id,
        "dataset_id": dataset_id,
        "paradigm": paradigm,
        "language": language,
        "task_description": description,
        "prompts": prompts,
    }
    if constraints is not None:
        doc["output_constraints"] = constraints
    if candidates is not None:
        doc["candidate_labels"] = candidates
    if generalization is not None:
        doc["generalization"] = generalization
    return doc


TOY_TASKS = [
    _task(
        "reviews-en-topic", "reviews-en", "CLS", "EN",
        "Identify which topic a customer review is mainly about.",
        [
            "Classify the review into one of the candidate topics. Candidate Topic: {candidates}",
            "Read the review and choose the single best matching topic from the candidates.",
            "Which of the candidate topics does this review address?",
        ],
        constraints="Answer with exactly one candidate topic and nothing else.",
        candidates=REVIEW_TOPICS,
        generalization="unseen_dataset",
    ),
    _task(
        "catalog-zh-class", "catalog-zh", "CLS", "ZH",
        "Assign a product title to its catalog category.",
        [
            "Classify the product title into one of the candidate categories. Candidates: {candidates}",
            "Pick the category that best fits this product title.",
        ],
        constraints="Answer with exactly one candidate category.",
        candidates=CATALOG_LABELS,
        generalization="unseen_dataset",
    ),
    _task(
        "garment-ner-zh-attrs", "garment-ner-zh", "OTHER", "ZH",
        "Extract garment attribute values and their attribute types from product text.",
        [
            "Extract every attribute value and its type from the text. Candidate types: {candidates}. {constraints}",
            "Find all garment attribute mentions. Types to consider: {candidates}. {constraints}",
        ],
        constraints="Output one 'type: value' pair per line, or None if there are no mentions.",
        candidates=GARMENT_LABELS,
    ),
    _task(
        "listing-ner-en-entities", "listing-ner-en", "OTHER", "EN",
        "Extract product entities and their types from listing text.",
        [
            "List every entity and its type from the listing. Candidate types: {candidates}. {constraints}",
            "Tag the entities mentioned in this listing using the candidate types: {candidates}. {constraints}",
        ],
        constraints="Output one 'TYPE: entity' pair per line, or None if there are none.",
        candidates=LISTING_LABELS,
    ),
    _task(
        "review-qa-en-answer", "review-qa-en", "EXT", "EN",
        "Answer a question using only words found in the customer review.",
        [
            "Answer the question using the shortest exact phrase from the review.",
            "Extract the answer to the question from the review text.",
        ],
        constraints="Copy the answer span verbatim from the review.",
        generalization="unseen_task",
    ),
    _task(
        "desc-gen-zh-describe", "desc-gen-zh", "GEN", "ZH",
        "Write an appealing product description for a product title.",
        [
            "Write a short, appealing product description for this title.",
            "Expand the product title into a persuasive one-paragraph description.",
        ],
    ),
    _task(
        "product-match-zh-align", "product-match-zh", "CLS", "ZH",
        "Decide whether two product listings describe the same product.",
        [
            "Do these two listings describe the same product? Answer Yes or No.",
            "Compare product A and product B and answer Yes if they are the same product, otherwise No.",
        ],
        constraints="Answer Yes or No only.",
        candidates=["Yes", "No"],
    ),
    # Derived atomic tasks (ids follow the transform planner).
    _task(
        "garment-ner-zh-span-detection", "garment-ner-zh-span-detection", "EXT", "ZH",
        "Detect attribute value mentions in garment text without typing them.",
        [
            "List every attribute value mentioned in the text, one per line, in order of appearance. Output None if there are none.",
            "Write out each attribute value mention on its own line; answer None when nothing is mentioned.",
        ],
    ),
    _task(
        "garment-ner-zh-entity-typing", "garment-ner-zh-entity-typing", "OTHER", "ZH",
        "Determine the attribute type of a highlighted entity in garment text.",
        [
            "Determine the attribute type of the highlighted entity. Candidate types: {candidates}. Answer as 'type: entity'.",
            "Which candidate type ({candidates}) fits the highlighted entity? Answer in the form 'type: entity'.",
        ],
        candidates=GARMENT_LABELS,
    ),
    _task(
        "listing-ner-en-span-detection", "listing-ner-en-span-detection", "EXT", "EN",
        "Detect product entity mentions in listing text without typing them.",
        [
            "List every entity mention in the listing, one per line, in order of appearance. Output None if there are none.",
        ],
    ),
    _task(
        "listing-ner-en-entity-typing", "listing-ner-en-entity-typing", "OTHER", "EN",
        "Determine the type of a highlighted entity in listing text.",
        [
            "Determine the type of the highlighted entity. Candidate types: {candidates}. Answer as 'TYPE: entity'.",
        ],
        candidates=LISTING_LABELS,
    ),
    _task(
        "review-qa-en-question-gen", "review-qa-en-question-gen", "GEN", "EN",
        "Write the question that a given answer addresses, based on a review.",
        [
            "Given the review and the answer, write the question being answered.",
            "Formulate the question that the provided answer responds to.",
        ],
    ),
    _task(
        "desc-gen-zh-reversed", "desc-gen-zh-reversed", "GEN", "ZH",
        "Condense a product description into a short selling title.",
        [
            "Condense the product description into a short, distinctive product title.",
            "Write a concise title for the product described below.",
        ],
    ),
    _task(
        "product-match-zh-title-attr-match", "product-match-zh-title-attr-match", "CLS", "ZH",
        "Decide whether an attribute pair belongs to the product with the given title.",
        [
            "Does the attribute belong to the product with this title? Answer Yes or No.",
            "Answer Yes if the attribute fits the titled product, otherwise No.",
        ],
        constraints="Answer Yes or No only.",
        candidates=["Yes", "No"],
    ),
    _task(
        "queries-en-query-rewriting", "queries-en-query-rewriting", "GEN", "EN",
        "Rewrite a shopping search query to be clearer while preserving intent.",
        [
            "Rewrite the search query so it is clearer, keeping the original intent.\nQuery: {input}",
        ],
    ),
    _task(
        "queries-en-query-segmentation", "queries-en-query-segmentation", "GEN", "EN",
        "Segment a shopping search query into meaningful units.",
        [
            "Segment the search query into meaningful units separated by ' / '.\nQuery: {input}",
        ],
    ),
    _task(
        "queries-en-query-question-gen", "queries-en-query-question-gen", "GEN", "EN",
        "Turn a shopping search query into a natural shopper question.",
        [
            "Turn the search query into a natural question a shopper might ask.\nQuery: {input}",
        ],
    ),
]

TOY_DATASETS = [
    {
        "dataset_id": "reviews-en",
        "paradigm": "CLS",
        "language": "EN",
        "path": "data/reviews_en.tsv",
        "adapter": "csv_cls",
        "data_type": "user_review",
        "labels": REVIEW_TOPICS,
    },
    {
        "dataset_id": "catalog-zh",
        "paradigm": "CLS",
        "language": "ZH",
        "path": "data/catalog_zh.tsv",
        "adapter": "csv_cls",
        "data_type": "product_info",
        "labels": CATALOG_LABELS,
    },
    {
        "dataset_id": "garment-ner-zh",
        "paradigm": "OTHER",
        "language": "ZH",
        "path": "data/garment_ner_zh.jsonl",
        "adapter": "ner_spans",
        "data_type": "product_info",
    },
    {
        "dataset_id": "listing-ner-en",
        "paradigm": "OTHER",
        "language": "EN",
        "path": "data/listing_ner_en.jsonl",
        "adapter": "ner_spans",
        "data_type": "product_info",
    },
    {
        "dataset_id": "review-qa-en",
        "paradigm": "EXT",
        "language": "EN",
        "path": "data/review_qa_en.jsonl",
        "adapter": "jsonl",
        "data_type": "user_review",
        "annotation_kind": "qa_pair",
    },
    {
        "dataset_id": "desc-gen-zh",
        "paradigm": "GEN",
        "language": "ZH",
        "path": "data/desc_gen_zh.jsonl",
        "adapter": "jsonl",
        "data_type": "product_info",
        "annotation_kind": "target_text",
    },
    {
        "dataset_id": "product-match-zh",
        "paradigm": "CLS",
        "language": "ZH",
        "path": "data/product_match_zh.jsonl",
        "adapter": "jsonl",
        "data_type": "product_info",
        "labels": ["Yes", "No"],
        "annotation_kind": "match_pair",
    },
    {
        "dataset_id": "queries-en",
        "paradigm": "GEN",
        "language": "EN",
        "path": "data/queries_en.txt",
        "adapter": "text_lines",
        "data_type": "search_query",
    },
]

TOY_CONFIG = {
    "seed": 20240601,
    "datasets": "datasets.yaml",
    "tasks": "tasks",
    "pseudo_label": {
        "endpoint": "builtin-mock",
        "model": "mock-labeler",
        "auth_env": None,
        "max_retries": 2,
        "timeout": 5.0,
        "max_concurrency": 2,
        "requests_per_minute": 600,
        "cache": "cache/pseudo_cache.jsonl",
    },
    "forge": {"skip_test_datasets": True},
    "filter": {"max_input_chars": 2048, "max_output_chars": 1024},
    "review_sample": {"n": 200},
    "split": {
        "test_tasks": ["reviews-en-topic", "review-qa-en-answer", "catalog-zh-class"],
        "train_cap": 800,
        "test_cap": 500,
    },
}


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def _yaml(doc) -> str:
    return yaml.safe_dump(doc, sort_keys=True, allow_unicode=True, default_flow_style=False)


def write_toy_corpus(root: str | Path) -> Path:
    """Materialize the toy corpus under `root`; returns the config path."""
    root = Path(root)

    _write(
        root / "data/reviews_en.tsv",
        "".join(f"{text}\t{label}\n" for text, label in _REVIEWS_EN),
    )
    _write(
        root / "data/catalog_zh.tsv",
        "".join(f"{text}\t{label}\n" for text, label in _CATALOG_ZH),
    )
    for name, source in (
        ("garment_ner_zh", _GARMENT_NER_ZH),
        ("listing_ner_en", _LISTING_NER_EN),
    ):
        lines = []
        for pieces in source:
            text, spans = _compose(pieces)
            lines.append(json.dumps({"text": text, "spans": spans}, ensure_ascii=False))
        _write(root / f"data/{name}.jsonl", "\n".join(lines) + "\n")

    qa_lines = []
    for i, (review, question, answer) in enumerate(_REVIEW_QA_EN, start=1):
        qa_lines.append(
            dumps_line(
                {
                    "id": f"review-qa-en/{i:06d}",
                    "dataset_id": "review-qa-en",
                    "language": "EN",
                    "input_text": review,
                    "annotations": {"kind": "qa_pair", "question": question, "answer": answer},
                    "label_source": "GOLDEN",
                    "lineage": [],
                }
            )
        )
    _write(root / "data/review_qa_en.jsonl", "\n".join(qa_lines) + "\n")

    gen_lines = []
    for i, (title, desc) in enumerate(_DESC_GEN_ZH, start=1):
        gen_lines.append(
            dumps_line(
                {
                    "id": f"desc-gen-zh/{i:06d}",
                    "dataset_id": "desc-gen-zh",
                    "language": "ZH",
                    "input_text": title,
                    "annotations": {"kind": "target_text", "text": desc},
                    "label_source": "GOLDEN",
                    "lineage": [],
                }
            )
        )
    _write(root / "data/desc_gen_zh.jsonl", "\n".join(gen_lines) + "\n")

    match_lines = []
    for i, (ta, aa, tb, ab, is_match) in enumerate(_MATCH_ZH, start=1):
        match_lines.append(
            dumps_line(
                {
                    "id": f"product-match-zh/{i:06d}",
                    "dataset_id": "product-match-zh",
                    "language": "ZH",
                    "input_text": _match_input(ta, aa, tb, ab),
                    "annotations": {
                        "kind": "match_pair",
                        "product_a": {"title": ta, "attributes": [list(p) for p in aa]},
                        "product_b": {"title": tb, "attributes": [list(p) for p in ab]},
                        "is_match": is_match,
                    },
                    "label_source": "GOLDEN",
                    "lineage": [],
                }
            )
        )
    _write(root / "data/product_match_zh.jsonl", "\n".join(match_lines) + "\n")

    _write(root / "data/queries_en.txt", "\n".join(_QUERIES_EN) + "\n")

    _write(root / "datasets.yaml", _yaml({"datasets": TOY_DATASETS}))
    for task in TOY_TASKS:
        _write(root / "tasks" / f"{task['task_id']}.yaml", _yaml(task))
    config_path = root / "config.yaml"
    _write(config_path, _yaml(TOY_CONFIG))
    return config_path
