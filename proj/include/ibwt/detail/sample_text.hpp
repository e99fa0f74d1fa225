#pragma once

#include <string_view>

namespace ibwt::detail {

// Training text for the order-2 character model behind the markov-text
// corpus generator. Plain prose, no punctuation beyond the basics.
inline constexpr std::string_view kSampleText =
    "The river comes down from the hills in the early spring, brown and loud with the "
    "melted snow, and for a few weeks the whole valley listens to it. The old mill stands "
    "at the bend where the water turns against the rocks. Nobody has ground corn there for "
    "many years, but the wheel still moves when the current is strong, and the children "
    "of the village like to stand on the bridge and count the turns. In the summer the "
    "river grows quiet and clear. The farmers cut their hay in the long fields on the "
    "eastern side, and in the evening the smell of it drifts over the water and into the "
    "narrow streets of the town. There is a market on the square every Saturday morning. "
    "People bring eggs and cheese and bread, apples in the autumn, honey and wool, and "
    "sometimes a calf or a few young goats tied with rope to the railing of the church. "
    "The baker opens before the sun is up, and by the time the first carts arrive the "
    "loaves are already cooling on the long wooden shelves by the door.\n"
    "The schoolmaster had lived in the town for most of his life. He knew every family and "
    "most of their troubles, and he kept a small notebook in which he wrote down the "
    "weather, the price of grain, and the names of the birds he saw from his window. On "
    "winter nights he would read the notebook from the beginning, and it seemed to him "
    "that the years were very much alike, with the same storms coming in the same weeks "
    "and the same birds returning to the same trees. Yet he also saw that the town was "
    "changing. The young people went away to the cities to find work, and fewer of them "
    "came back. The road to the north had been widened, and the trucks that used it were "
    "larger every year. A new bridge was planned, and the old one, which had stood for "
    "three hundred years, would be kept only for those who wished to walk.\n"
    "In the spring of that year a stranger arrived on the evening train. She carried a "
    "single leather case and asked at the station for a room. The stationmaster sent her "
    "to the widow who lived above the pharmacy, and within a week everyone in the town "
    "knew that she had come to study the river. She walked along its banks every morning "
    "with a measuring rod and a box of glass bottles, and she wrote her numbers in a book "
    "much like the one the schoolmaster kept. When he learned of this he went to meet her, "
    "and they spent the whole afternoon comparing what they had written. She told him "
    "that the river was carrying more earth than it had in the past, that the forests on "
    "the hills had been cut, and that the rain now ran off the slopes too quickly. He told "
    "her about the floods he remembered as a boy, and about the winter when the water rose "
    "so high that the mill wheel was torn from its axle and carried away to the sea.\n"
    "They met often after that. In the evenings they sat at the window of the inn and "
    "talked about the weather and the water, about the birds and the fields, and about "
    "the strange way in which small changes gather over many years until one morning the "
    "world is different and nobody can say exactly when it happened. When the summer "
    "ended she packed her bottles and her book and took the train back to the city. The "
    "schoolmaster walked with her to the station, and on the way home he stopped on the "
    "old bridge and watched the river for a long time before he went back to his room "
    "and wrote the day down in his notebook.\n";

}  // namespace ibwt::detail
