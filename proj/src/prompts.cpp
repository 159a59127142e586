#include "pdrr/prompts.hpp"

#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "pdrr/error.hpp"

namespace pdrr::prompts {

// Few-shot bank
// -------------
// The first example of every template is the worked example shipped with the
// method's prompt list. The remaining examples pad each template to its
// role's shot count and are drawn from the same case studies (Rift Valley,
// Taylor Swift Fearless tour, Mikheil Saakashvili, Grand Canyon, Tennessee
// Williams, Rome) plus a handful of short general-knowledge questions.

namespace {

using llm::FewShotExample;
using llm::PromptTemplate;

PromptTemplate question_type() {
    PromptTemplate t;
    t.name = "question_type";
    t.instruction = R"(Please analyze the following question and determine its type.

Question Type:
1. Chain Structure
2. Parallel Structure

Output the question type with "{'{question type}'}", and provide explanation. Do NOT format into markdown or use headers.)";
    t.query = "Question: {{question}}\nAnswer:";
    t.slots = {"question"};
    t.few_shot = {
        {"Question: Who is the coach of the team owned by Steve Bisciotti?",
         R"(Answer: The type of this question is {Chain Structure}, the bridge entity is "team". We should first find the team owned by Steve Bisciotti. And then find the coach of the team.)"},
        {"Question: What country bordering France contains an airport that serves Nijmegen?",
         R"(Answer: The type of this question is {Parallel Structure}, the bridge entity is "country". The two conditions are independent: find the countries that border France, find the countries that contain an airport serving Nijmegen, and then take the intersection.)"},
        {"Question: What movies did the artist that had the concert tour called the Taylor Swift Fears 2009 Tour play in?",
         R"(Answer: The type of this question is {Chain Structure}, the bridge entity is "artist". We should first find the artist of the Taylor Swift Fearless 2009 Tour. And then find the movies the artist played in.)"},
        {"Question: What is there to see in Mountain Time Zone near the Grand Canyon?",
         R"(Answer: The type of this question is {Parallel Structure}, the bridge entity is "attraction". We should find the places in the Mountain Time Zone and the places near the Grand Canyon separately, and then take the intersection.)"},
        {"Question: Which college attended by Tennessee Williams has the largest population of postgraduates?",
         R"(Answer: The type of this question is {Parallel Structure}, the bridge entity is "college". We should keep every college Tennessee Williams attended and then compare their postgraduate populations.)"},
    };
    return t;
}

PromptTemplate decompose() {
    PromptTemplate t;
    t.name = "decompose";
    t.instruction = R"(Please first determine the reasoning process of the question. Then decompose the question into triples following the reasoning process.
Each triple should contain concise head entity, relation, and tail entity. The entity with "#number" is what we need to find.)";
    t.query = "Question: {{question}}\n\nQuestion Type: {{question_type}}\nAnswer:";
    t.slots = {"question", "question_type"};
    t.few_shot = {
        {"Question: Who is the coach of the team owned by Steve Bisciotti?\nQuestion Type: Chain Structure",
         R"(Answer: Given the question type is chain structure, the sequence of the triples is important. The bridge entity is "team". We should first find the team owned by Steve Bisciotti. And then find the coach of the team.

The output triples are:

{"head": "Steve Bisciotti", "relation": "owns", "tail": "team#1"},
{"head": "team#1", "relation": "is coached by", "tail": "coach#1"})"},
        {"Question: What country bordering France contains an airport that serves Nijmegen?\nQuestion Type: Parallel Structure",
         R"(Answer: Given the question type is parallel structure, the triples are independent of each other. The bridge entity is "country". We should find the countries that border France and the countries that contain an airport that serves Nijmegen.

The output triples are:

{"head": "country#1", "relation": "borders", "tail": "France"},
{"head": "country#1", "relation": "contains an airport that serves", "tail": "Nijmegen"})"},
        {"Question: What movies did the artist that had the concert tour called the Taylor Swift Fears 2009 Tour play in?\nQuestion Type: Chain Structure",
         R"(Answer: Given the question type is chain structure, the sequence of the triples is important. The bridge entity is "artist". We should first find the artist of the Taylor Swift Fearless 2009 Tour. And then find the movies the artist played in.

The output triples are:

{"head": "Taylor Swift Fearless 2009 Tour", "relation": "is concert tour by", "tail": "artist#1"},
{"head": "artist#1", "relation": "played in", "tail": "movie#1"})"},
    };
    return t;
}

PromptTemplate relation_prune() {
    PromptTemplate t;
    t.name = "relation_prune";
    t.instruction = R"(Please retrieve relations that relative to the triple and rate their relative on a scale from 0 to 1 (the sum of the scores of relations is 1). Do NOT format into markdown or use headers.)";
    t.query = "Triple: {{triple}}\nRelations: {{relations}}\nAnswer:";
    t.slots = {"triple", "relations"};
    t.few_shot = {
        {R"(Triple: {Van Andel Institute, founded in part by, American businessman#1}
Relations: {1. affiliation
2. country
3. donations
4. educated_at
5. employer
6. headquarters_location
7. legal_form
8. located_in_the_administrative_territorial_entity
9. total_revenue})",
         R"(Answer:
1. {affiliation (Score: 0.4)}: This relation is relevant because it can provide information about the individuals or organizations associated with the Van Andel Institute, including the American businessman who co-founded the Amway Corporation.
2. {donations (Score: 0.3)}: This relation is relevant because it can provide information about the financial contributions made to the Van Andel Institute, which may include donations from the American businessman in question.
3. {educated_at (Score: 0.3)}: This relation is relevant because it can provide information about the educational background of the American businessman, which may have influenced his involvement in founding the Van Andel Institute.)"},
        {R"(Triple: {Taylor Swift Fearless 2009 Tour, is concert tour by, artist#1}
Relations: {1. event.event.locations
2. music.concert_tour.album_or_release_supporting
3. music.concert_tour.artist
4. type.object.type})",
         R"(Answer:
1. {music.concert_tour.artist (Score: 0.8)}: This relation directly links a concert tour to the artist who performed it.
2. {music.concert_tour.album_or_release_supporting (Score: 0.2)}: The supported album can point to the artist indirectly.)"},
        {R"(Triple: {Grand Canyon, is near, attraction#1}
Relations: {1. geography.geographical_feature.category
2. location.location.nearby_airports
3. location.location.time_zones
4. travel.tourist_attraction.near_travel_destination})",
         R"(Answer:
1. {travel.tourist_attraction.near_travel_destination (Score: 0.6)}: This relation lists destinations near the Grand Canyon.
2. {location.location.nearby_airports (Score: 0.3)}: Nearby airports are places close to the Grand Canyon.
3. {location.location.time_zones (Score: 0.1)}: The time zone gives only weak information about nearby places.)"},
    };
    return t;
}

PromptTemplate triple_prune() {
    PromptTemplate t;
    t.name = "triple_prune";
    t.instruction = R"(Please identify the triples that are relevant to the given filter-triple and rate their relevance on a scale from 0 to 1 (the sum of the scores of triples is 1). Do NOT include irrelevant triples. Do NOT format into markdown or use headers. You should choose at least 1 triple from the triples.)";
    t.query = "Filter Triple: {{filter_triple}}\nTriples: {{triples}}\nAnswer:";
    t.slots = {"filter_triple", "triples"};
    t.few_shot = {
        {R"(Filter Triple: {Rift Valley Province, is located in, nation#1}
Triples: {1. Rift Valley Province, is located in, Kenya
2. Kenya, location.country.currency_used, Kenyan shilling
3. San Antonio Spurs, home venue, AT&T Center
4. Rift Valley Province, is located in, UnName_Entity
5. UnName_Entity, education.education.institution, Castlemont High School
6. Rift Valley Province, location.contains, Baringo County
7. Rift Valley Province, location.contained_by, Kenya})",
         R"(Answer:
1. {Rift Valley Province, is located in, Kenya. (Score: 0.5)}: This triple provides significant information about Kenya's location, which relatives to the filter-triple.
2. {Rift Valley Province, location.contained_by, Kenya. (Score: 0.4)}: This triple provides significant information about Kenya's location, which relatives to the filter-triple.
3. {Rift Valley Province, location.contains, Baringo County. (Score: 0.1)}: This triple provides information cannot show us the location of it, so it is irrelevant.)"},
        {R"(Filter Triple: {Taylor Swift, played in, movie#1}
Triples: {1. Taylor Swift, film.actor.film, UnName_Entity; UnName_Entity, film.performance.film, The Lorax
2. Taylor Swift, music.artist.genre, Country
3. Taylor Swift, people.person.place_of_birth, Reading})",
         R"(Answer:
1. {Taylor Swift, film.actor.film, UnName_Entity; UnName_Entity, film.performance.film, The Lorax. (Score: 0.9)}: This triple names a film Taylor Swift performed in.
2. {Taylor Swift, music.artist.genre, Country. (Score: 0.1)}: The genre says little about her films.)"},
        {R"(Filter Triple: {location#1, appointed to governmental position, Mikheil Saakashvili}
Triples: {1. UnName_Entity, government.government_position_held.appointed_by, Mikheil Saakashvili; UnName_Entity, government.government_position_held.jurisdiction_of_office, Georgia
2. Ukraine, people.person.nationality, Mikheil Saakashvili
3. Tbilisi, people.person.place_of_birth, Mikheil Saakashvili})",
         R"(Answer:
1. {UnName_Entity, government.government_position_held.appointed_by, Mikheil Saakashvili; UnName_Entity, government.government_position_held.jurisdiction_of_office, Georgia. (Score: 0.8)}: The jurisdiction of the office he was appointed to is the location we need.
2. {Ukraine, people.person.nationality, Mikheil Saakashvili. (Score: 0.2)}: Nationality is related to a country but not to an appointment.)"},
    };
    return t;
}

PromptTemplate chain_select() {
    PromptTemplate t;
    t.name = "chain_select";
    t.instruction = "Please select the best reasoning chain to answer the question from the following chains:";
    t.query = "Reasoning Chains: {{chains}}\n\nQuestion: {{question}}\nAnswer:";
    t.slots = {"chains", "question"};
    t.few_shot = {
        {R"(Reasoning Chains:
chain 1: {Country Nation World Tour, music.concert-tour.artist, Brad Paisley}, {Brad Paisley, owns, Nashville Predators}
chain 2: {Country Nation World Tour, music.concert-tour.artist, Brad Paisley}, {Brad Paisley, attended, Belmont University}
chain 3: {Country Nation World Tour, is hold by, Steve Bisciotti}, {Steve Bisciotti, attended, University of Alabama at Birmingham}
Question: Where did the "Country Nation World Tour" concert artist go to college?)",
         R"(Answer: The best reasoning chain is chain 2: {Country Nation World Tour, music.concert-tour.artist, Brad Paisley}, {Brad Paisley, attended, Belmont University}.
It successfully finds the bridge entity "artist", which refers to Brad Paisley, the artist of the Country Nation World Tour, and then finds the college he attended: Belmont University.)"},
        {R"(Reasoning Chains:
chain 1: {Rift Valley Province, location.administrative_division.country, Kenya}, {Kenya, location.country.currency_used, Kenyan shilling}
chain 2: {Rift Valley Province, location.location.contains, Baringo County}, {Baringo County, location.location.containedby, Kenya}
Question: Rift Valley Province is located in a nation that uses which form of currency?)",
         R"(Answer: The best reasoning chain is chain 1: {Rift Valley Province, location.administrative_division.country, Kenya}, {Kenya, location.country.currency_used, Kenyan shilling}.
It finds the nation containing Rift Valley Province, Kenya, and then the currency Kenya uses.)"},
        {R"(Reasoning Chains:
chain 1: {Taylor Swift Fearless 2009 Tour, music.concert_tour.artist, Taylor Swift}, {Taylor Swift, music.artist.genre, Country}
chain 2: {Taylor Swift Fearless 2009 Tour, music.concert_tour.artist, Taylor Swift}, {Taylor Swift, film.actor.film, UnName_Entity}, {UnName_Entity, film.performance.film, The Lorax}
Question: What movies did the artist that had the concert tour called the Taylor Swift Fears 2009 Tour play in?)",
         R"(Answer: The best reasoning chain is chain 2: it identifies Taylor Swift as the artist of the tour and then a film she performed in, The Lorax.)"},
    };
    return t;
}

PromptTemplate answer_chain() {
    PromptTemplate t;
    t.name = "answer_chain";
    t.instruction = R"(Given a question and the associated information, you are asked to answer the question using the retrieved reasoning chain and your own knowledge. Please think setep by step and follow the Question Decomposition Triples carefully. Do NOT output answer without reasoning steps. Do NOT format into markdown or use headers. At the end, output the final answer in this format: "{'{answer}'}")";
    t.query = "Question: {{question}}\n\nQuestion Decomposition Triples: {{decomposition}}\nRetrieved Reasoning Chain: {{chain}}\nAnswer:";
    t.slots = {"question", "decomposition", "chain"};
    t.few_shot = {
        {R"(Question: Rift Valley Province is located in a nation that uses which form of currency?
Question Decomposition Triples: {Rift Valley Province, is located in, nation#1}, {nation#1, uses currency, currency#1}
Retrieved Reasoning Chain: {Rift Valley Province, location.administrative_division.country, Kenya}, {Kenya, location.country.currency_used, Kenyan shilling})",
         R"(Answer: Following the question decomposition triples:
Step 1: Identify the nation in which Rift Valley Province is located. According to the retrieved reasoning chain, Rift Valley Province is located in Kenya.
Step 2: Determine the currency used by Kenya. The retrieved reasoning chain indicates that Kenya uses the Kenyan shilling.
{Kenyan shilling})"},
        {R"(Question: What movies did the artist that had the concert tour called the Taylor Swift Fears 2009 Tour play in?
Question Decomposition Triples: {Taylor Swift Fearless 2009 Tour, is concert tour by, artist#1}, {artist#1, played in, movie#1}
Retrieved Reasoning Chain: {Taylor Swift Fearless 2009 Tour, music.concert_tour.artist, Taylor Swift}, {UnName_Entity, film.performance.actor, Taylor Swift}, {UnName_Entity, film.performance.film, The Lorax})",
         R"(Answer: Following the question decomposition triples:
Step 1: Identify the artist who had the Taylor Swift Fearless 2009 Tour. According to the retrieved reasoning chain, the artist is Taylor Swift.
Step 2: Determine the movies Taylor Swift played in. The retrieved reasoning chain shows that Taylor Swift acted in The Lorax.
{The Lorax})"},
        {R"(Question: What location that appointed Mikheil Saakashvili to governmental position is a country in Eastern Europe?
Question Decomposition Triples: {location#1, appointed to governmental position, Mikheil Saakashvili}, {location#1, is a country in, Eastern Europe}
Retrieved Reasoning Chain: {UnName_Entity, government.government_position_held.appointed_by, Mikheil Saakashvili}, {UnName_Entity, government.government_position_held.jurisdiction_of_office, Georgia}, {Georgia, location.location.containedby, Eastern Europe})",
         R"(Answer: Following the question decomposition triples:
Step 1: Identify the location that appointed Mikheil Saakashvili to a governmental position. According to the retrieved reasoning chain, the jurisdiction of the office he held is Georgia.
Step 2: Determine if Georgia is a country in Eastern Europe. The retrieved reasoning chain shows that Georgia is contained within Eastern Europe.
{Georgia})"},
        {R"(Question: Who is the coach of the team owned by Steve Bisciotti?
Question Decomposition Triples: {Steve Bisciotti, owns, team#1}, {team#1, is coached by, coach#1}
Retrieved Reasoning Chain: {Steve Bisciotti, sports.sports_team_owner.teams_owned, Baltimore Ravens}, {Baltimore Ravens, american_football.football_team.current_head_coach, John Harbaugh})",
         R"(Answer: Following the question decomposition triples:
Step 1: Identify the team owned by Steve Bisciotti. According to the retrieved reasoning chain, he owns the Baltimore Ravens.
Step 2: Determine the coach of the Baltimore Ravens. The retrieved reasoning chain shows that the current head coach is John Harbaugh.
{John Harbaugh})"},
        {R"(Question: What state is home to the university that is represented in sports by George Washington Colonials men's basketball?
Question Decomposition Triples: {George Washington Colonials men's basketball, represents, university#1}, {university#1, is located in, state#1}
Retrieved Reasoning Chain: {George Washington Colonials men's basketball, sports.school_sports_team.school, George Washington University}, {George Washington University, location.location.containedby, Washington, D.C.})",
         R"(Answer: Following the question decomposition triples:
Step 1: Identify the university represented by George Washington Colonials men's basketball. According to the retrieved reasoning chain, it is George Washington University.
Step 2: Determine where George Washington University is located. The retrieved reasoning chain shows that it is in Washington, D.C.
{Washington, D.C.})"},
    };
    return t;
}

PromptTemplate answer_parallel() {
    PromptTemplate t;
    t.name = "answer_parallel";
    t.instruction = R"(Given a question and the associated information, you are asked to answer the question with these Retrieved Triples and your own knowledge. Please think setep by step and follow the Question Decomposition Triples carefully. Do NOT output answer without reasoning steps. Do NOT format into markdown or use headers. At the end, output the final answer in this format: "{'{answer}'}".)";
    t.query = "Question: {{question}}\n\nQuestion Decomposition Triples: {{decomposition}}\n\nRetrieved Triples: {{triples}}\nAnswer:";
    t.slots = {"question", "decomposition", "triples"};
    t.few_shot = {
        {R"(Question: What country bordering France contains an airport that serves Nijmegen?
Question Decomposition Triples: {country#1, borders, France}, {country#1, contains an airport that serves, Nijmegen}
Retrieved Triples: {{{Belgium, borders, France}, {Germany, borders, France}, {Italy, borders, France}, {Switzerland, borders, France}}, {{Germany, contains an airport that serves, Nijmegen}, {Netherlands, contains an airport that serves, Nijmegen}}})",
         R"(Answer: Following the question decomposition Triples:
Step 1: Identify the country that borders France. According to the retrieved triples, the country are Belgium, Germany, Italy, and Switzerland.
Step 2: Identify the country that contains an airport that serves Nijmegen. According to the retrieved triples, the country is Netherlands.
Step 3: Find the intersection of the two sets, which is Germany.
{Germany})"},
        {R"(Question: What is there to see in Mountain Time Zone near the Grand Canyon?
Question Decomposition Triples: {attraction#1, is in, Mountain Time Zone}, {Grand Canyon, is near, attraction#1}
Retrieved Triples: {{{Colorado Springs, location.location.time_zones, Mountain Time Zone}, {Phoenix, location.location.time_zones, Mountain Time Zone}}, {{Grand Canyon, travel.tourist_attraction.near_travel_destination, Phoenix}, {Grand Canyon, travel.tourist_attraction.near_travel_destination, Lake Powell}}})",
         R"(Answer: Following the question decomposition Triples:
Step 1: Identify places located in the Mountain Time Zone. According to the retrieved triples, they include Colorado Springs and Phoenix.
Step 2: Identify places near the Grand Canyon. According to the retrieved triples, they include Phoenix and Lake Powell.
Step 3: Find the intersection of the two sets, which is Phoenix.
{Phoenix})"},
        {R"(Question: What location that appointed Mikheil Saakashvili to governmental position is a country in Eastern Europe?
Question Decomposition Triples: {location#1, appointed to governmental position, Mikheil Saakashvili}, {Eastern Europe, contains, location#1}
Retrieved Triples: {{{UnName_Entity, government.government_position_held.appointed_by, Mikheil Saakashvili}, {UnName_Entity, government.government_position_held.jurisdiction_of_office, Georgia}}, {{Eastern Europe, location.location.partially_contains, Atyrau Region}, {Eastern Europe, location.location.partially_contains, Georgia}}})",
         R"(Answer: Following the question decomposition Triples:
Step 1: Identify the location that appointed Mikheil Saakashvili to a governmental position. According to the retrieved triples, the jurisdiction of office is Georgia.
Step 2: Determine the regions located in Eastern Europe. According to the retrieved triples, they include the Atyrau Region and Georgia.
Step 3: Find the intersection of the two sets, which is Georgia.
{Georgia})"},
        {R"(Question: Which college attended by Tennessee Williams has the largest population of postgraduates?
Question Decomposition Triples: {Tennessee Williams, attended, college#1}, {college#1, has the largest population of, postgraduates}
Retrieved Triples: {{{UnName_Entity, education.education.student, Tennessee Williams}, {UnName_Entity, education.education.institution, Washington University in St. Louis}, {UnName_Entity, education.education.institution, University of Missouri}, {UnName_Entity, education.education.institution, University of Iowa}, {UnName_Entity, education.education.institution, The New School}}, {}})",
         R"(Answer: Following the question decomposition Triples:
Step 1: Identify the colleges attended by Tennessee Williams. According to the retrieved triples, he attended Washington University in St. Louis, University of Missouri, University of Iowa, and The New School.
Step 2: Determine the postgraduate population of each college. The retrieved triples do not provide this information, so I rely on my own knowledge: the University of Iowa has the largest postgraduate population of these colleges.
{University of Iowa})"},
        {R"(Question: Where with a population once of less than 5732212 is Rome, Italy located?
Question Decomposition Triples: {Rome, is located in, location#1}, {location#1, had population less than, 5732212}
Retrieved Triples: {{{Rome, location.location.containedby, Italy}, {Rome, location.location.containedby, Lazio}, {Rome, location.location.containedby, Province of Rome}}, {}})",
         R"(Answer: Following the question decomposition Triples:
Step 1: Identify where Rome, Italy is located. According to the retrieved triples, Rome is located in Italy, Lazio, and the Province of Rome.
Step 2: Identify which of these locations had a population of less than 5,732,212. The retrieved triples do not provide population data, so I rely on my own knowledge. Italy and Lazio are larger, while the Province of Rome once had fewer inhabitants.
{Province of Rome})"},
    };
    return t;
}

const std::vector<std::pair<std::string, std::string>>& general_questions() {
    // (question, answer) pairs shared by the IO / CoT baselines.
    static const std::vector<std::pair<std::string, std::string>> qs = {
        {"What state is home to the university that is represented in sports by George Washington Colonials men's basketball?",
         "Washington, D.C."},
        {"Who is the coach of the team owned by Steve Bisciotti?", "John Harbaugh"},
        {"What is the capital of the country where the Eiffel Tower is located?", "Paris"},
        {"Which language is spoken in the country whose capital is Lima?", "Spanish"},
        {"Who directed the film in which Taylor Swift voiced Audrey?", "Chris Renaud"},
    };
    return qs;
}

PromptTemplate answer_io() {
    PromptTemplate t;
    t.name = "answer_io";
    t.instruction = R"(Please answer the question, and output the answer in this format: "{'{answer}'}". Do NOT format into markdown or use headers)";
    t.query = "Question: {{question}}\nAnswer:";
    t.slots = {"question"};
    for (const auto& [q, a] : general_questions()) {
        t.few_shot.push_back({"Question: " + q, "Answer: {" + a + "}"});
    }
    return t;
}

PromptTemplate answer_cot() {
    PromptTemplate t;
    t.name = "answer_cot";
    t.instruction = R"(Please think setep by step and answer the question. Output the answer in this format: "{'{answer}'}". Do NOT format into markdown or use headers)";
    t.query = "Question: {{question}}\nAnswer:";
    t.slots = {"question"};
    const auto& qs = general_questions();
    t.few_shot = {
        {"Question: " + qs[0].first,
         "Answer: First, the education institution has a sports team named George Washington Colonials men's basketball in is George Washington University , Second, George Washington University is in Washington D.C. The answer is {Washington, D.C.}."},
        {"Question: " + qs[1].first,
         "Answer: First, Steve Bisciotti owns the Baltimore Ravens. Second, the head coach of the Baltimore Ravens is John Harbaugh. The answer is {John Harbaugh}."},
        {"Question: " + qs[2].first,
         "Answer: First, the Eiffel Tower is located in France. Second, the capital of France is Paris. The answer is {Paris}."},
        {"Question: " + qs[3].first,
         "Answer: First, Lima is the capital of Peru. Second, the most widely spoken language in Peru is Spanish. The answer is {Spanish}."},
        {"Question: " + qs[4].first,
         "Answer: First, Taylor Swift voiced Audrey in The Lorax. Second, The Lorax was directed by Chris Renaud. The answer is {Chris Renaud}."},
    };
    return t;
}

constexpr const char* kPdrInstruction =
    R"(Answer the question using the provided decomposition triples and your own knowledge. Think step by step, and strictly follow the triples. Do not skip reasoning, use markdown or headers. At the end, output the final answer as: "{'{answer}'}".)";

PromptTemplate answer_pdr_chain() {
    PromptTemplate t;
    t.name = "answer_pdr_chain";
    t.instruction = kPdrInstruction;
    t.query = "Question: {{question}}\n\nQuestion Decomposition Triples: {{decomposition}}\nAnswer:";
    t.slots = {"question", "decomposition"};
    t.few_shot = {
        {R"(Question: Where did the "Country Nation World Tour" concert artist go to college?
Question Decomposition Triples: {{Country Nation World Tour, is concert tour by, artist#1}, {artist#1, attended, college#1}})",
         R"(Answer: Following the question decomposition triples:
Step 1: Identify the artist of the "Country Nation World Tour" concert. Based on my knowledge, the artist is Brad Paisley.
Step 2: Determine the college that Brad Paisley attended. Based on my knowledge, he attended Belmont University.
{Belmont University})"},
        {R"(Question: Who is the coach of the team owned by Steve Bisciotti?
Question Decomposition Triples: {{Steve Bisciotti, owns, team#1}, {team#1, is coached by, coach#1}})",
         R"(Answer: Following the question decomposition triples:
Step 1: Identify the team owned by Steve Bisciotti. Based on my knowledge, he owns the Baltimore Ravens.
Step 2: Determine the coach of the Baltimore Ravens. Based on my knowledge, the head coach is John Harbaugh.
{John Harbaugh})"},
        {R"(Question: What is the capital of the country where the Eiffel Tower is located?
Question Decomposition Triples: {{Eiffel Tower, is located in, country#1}, {country#1, has capital, city#1}})",
         R"(Answer: Following the question decomposition triples:
Step 1: Identify the country where the Eiffel Tower is located. Based on my knowledge, it is France.
Step 2: Determine the capital of France. Based on my knowledge, it is Paris.
{Paris})"},
        {R"(Question: Which language is spoken in the country whose capital is Lima?
Question Decomposition Triples: {{country#1, has capital, Lima}, {country#1, speaks, language#1}})",
         R"(Answer: Following the question decomposition triples:
Step 1: Identify the country whose capital is Lima. Based on my knowledge, it is Peru.
Step 2: Determine the language spoken in Peru. Based on my knowledge, the main language is Spanish.
{Spanish})"},
        {R"(Question: What state is home to the university that is represented in sports by George Washington Colonials men's basketball?
Question Decomposition Triples: {{George Washington Colonials men's basketball, represents, university#1}, {university#1, is located in, state#1}})",
         R"(Answer: Following the question decomposition triples:
Step 1: Identify the university represented by George Washington Colonials men's basketball. Based on my knowledge, it is George Washington University.
Step 2: Determine where George Washington University is located. Based on my knowledge, it is in Washington, D.C.
{Washington, D.C.})"},
    };
    return t;
}

PromptTemplate answer_pdr_parallel() {
    PromptTemplate t;
    t.name = "answer_pdr_parallel";
    t.instruction = kPdrInstruction;
    t.query = "Question: {{question}}\n\nQuestion Decomposition Triples: {{decomposition}}\nAnswer:";
    t.slots = {"question", "decomposition"};
    t.few_shot = {
        {R"(Question: What country bordering France contains an airport that serves Nijmegen?
Question Decomposition Triples: {{country#1, borders, France}, {country#1, contains an airport that serves, Nijmegen}})",
         R"(Answer: Following the question decomposition Triples:
Step 1: Identify the country that borders France. Based on my own knowledge, the country are Belgium, Germany, Italy, and Switzerland.
Step 2: Identify the country that contains an airport that serves Nijmegen. Based on my knowledge, the country which contains an airport that serves Nijmegen are Germany and Netherlands.
Step 3: Find the intersection of the two sets, which is Germany.
{Germany})"},
        {R"(Question: What is there to see in Mountain Time Zone near the Grand Canyon?
Question Decomposition Triples: {{attraction#1, is in, Mountain Time Zone}, {Grand Canyon, is near, attraction#1}})",
         R"(Answer: Following the question decomposition Triples:
Step 1: Identify places in the Mountain Time Zone. Based on my knowledge, these include Phoenix, Flagstaff, Denver, and Salt Lake City.
Step 2: Identify places near the Grand Canyon. Based on my knowledge, these include Phoenix, Flagstaff, and Lake Powell.
Step 3: Find the intersection of the two sets. Phoenix is a major destination in both sets.
{Phoenix})"},
        {R"(Question: What location that appointed Mikheil Saakashvili to governmental position is a country in Eastern Europe?
Question Decomposition Triples: {{location#1, appointed to governmental position, Mikheil Saakashvili}, {Eastern Europe, contains, location#1}})",
         R"(Answer: Following the question decomposition Triples:
Step 1: Identify the locations that appointed Mikheil Saakashvili to a governmental position. Based on my knowledge, these are Georgia and Ukraine's Odesa Oblast.
Step 2: Identify the countries in Eastern Europe. Based on my knowledge, these include Georgia, Ukraine, and Moldova.
Step 3: Find the intersection of the two sets. The country that appointed him and lies in Eastern Europe is Georgia.
{Georgia})"},
        {R"(Question: Which country bordering Mexico has Spanish as its official language?
Question Decomposition Triples: {{country#1, borders, Mexico}, {country#1, has official language, Spanish}})",
         R"(Answer: Following the question decomposition Triples:
Step 1: Identify the countries that border Mexico. Based on my knowledge, they are the United States, Guatemala, and Belize.
Step 2: Identify which of them have Spanish as the official language. Based on my knowledge, Guatemala does, while Belize uses English and the United States has no official language at the federal level in most references.
Step 3: Find the intersection of the two sets, which is Guatemala.
{Guatemala})"},
        {R"(Question: Which ocean borders both Chile and Australia?
Question Decomposition Triples: {{ocean#1, borders, Chile}, {ocean#1, borders, Australia}})",
         R"(Answer: Following the question decomposition Triples:
Step 1: Identify the oceans that border Chile. Based on my knowledge, this is the Pacific Ocean.
Step 2: Identify the oceans that border Australia. Based on my knowledge, these are the Indian Ocean, the Pacific Ocean, and the Southern Ocean.
Step 3: Find the intersection of the two sets, which is the Pacific Ocean.
{Pacific Ocean})"},
    };
    return t;
}

llm::PromptTemplate load_template_file(const std::filesystem::path& p, std::string name) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw InvalidTemplate("cannot open " + p.string());
    auto j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw InvalidTemplate(p.string() + ": not a JSON object");
    llm::PromptTemplate t;
    t.name = std::move(name);
    try {
        t.instruction = j.at("instruction").get<std::string>();
        t.query = j.at("query").get<std::string>();
        t.slots = j.at("slots").get<std::vector<std::string>>();
        for (const auto& ex : j.at("few_shot")) {
            t.few_shot.push_back({ex.at("input").get<std::string>(), ex.at("output").get<std::string>()});
        }
    } catch (const nlohmann::json::exception& e) {
        throw InvalidTemplate(p.string() + ": " + e.what());
    }
    return t;
}

}  // namespace

std::string_view template_name(TemplateId id) {
    switch (id) {
        case TemplateId::QuestionType: return "question_type";
        case TemplateId::Decompose: return "decompose";
        case TemplateId::RelationPrune: return "relation_prune";
        case TemplateId::TriplePrune: return "triple_prune";
        case TemplateId::ChainSelect: return "chain_select";
        case TemplateId::AnswerChain: return "answer_chain";
        case TemplateId::AnswerParallel: return "answer_parallel";
        case TemplateId::AnswerIo: return "answer_io";
        case TemplateId::AnswerCot: return "answer_cot";
        case TemplateId::AnswerPdrChain: return "answer_pdr_chain";
        case TemplateId::AnswerPdrParallel: return "answer_pdr_parallel";
    }
    return "unknown";
}

std::size_t expected_shots(TemplateId id) {
    switch (id) {
        case TemplateId::Decompose:
        case TemplateId::RelationPrune:
        case TemplateId::TriplePrune:
        case TemplateId::ChainSelect:
            return 3;
        default:
            return 5;
    }
}

TemplateSet TemplateSet::builtin() {
    TemplateSet s;
    s.templates_ = {question_type(),   decompose(),        relation_prune(), triple_prune(),
                    chain_select(),    answer_chain(),     answer_parallel(), answer_io(),
                    answer_cot(),      answer_pdr_chain(), answer_pdr_parallel()};
    for (std::size_t i = 0; i < kTemplateCount; ++i) {
        s.templates_[i].validate(expected_shots(static_cast<TemplateId>(i)));
    }
    return s;
}

TemplateSet TemplateSet::from_directory(const std::string& dir) {
    if (!std::filesystem::is_directory(dir)) throw InvalidTemplate("not a directory: " + dir);
    TemplateSet s = builtin();
    for (std::size_t i = 0; i < kTemplateCount; ++i) {
        auto id = static_cast<TemplateId>(i);
        std::string name(template_name(id));
        auto p = std::filesystem::path(dir) / (name + ".json");
        if (!std::filesystem::exists(p)) continue;
        auto t = load_template_file(p, name);
        t.validate(expected_shots(id));
        s.templates_[i] = std::move(t);
    }
    return s;
}

}  // namespace pdrr::prompts
